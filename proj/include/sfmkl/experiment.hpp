#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sfmkl/evaluation.hpp"
#include "sfmkl/mkl.hpp"

namespace sfmkl {

    enum class Method {
        kUniform,  ///< fixed beta = 0 kernel, no learning
        kL1,
        kL2,
    };

    [[nodiscard]] Method ParseMethod(std::string_view name);
    [[nodiscard]] std::string_view ToString(Method method);

    struct LayerConfig {
        double radius = 0.4;
        std::size_t count = 25;
        PointSet point_set = PointSet::kTDesign;
    };

    struct SliceRequest {
        Plane plane;
        double spacing = 0.02;
    };

    struct ExperimentConfig {
        std::vector<PointSource> sources;
        double speed_of_sound = 340.0;
        Sphere region{Position3::Zero(), 0.4};
        std::vector<LayerConfig> layers;
        BankGrid bank;
        double lambda = 0.1;
        std::vector<Method> methods{Method::kUniform, Method::kL1, Method::kL2};
        std::vector<double> frequencies;
        std::optional<double> snr_db;
        std::vector<std::uint64_t> seeds{0};
        double grid_spacing = 0.05;
        L1Options l1;
        L2Options l2;
        std::filesystem::path output_dir = "out";
        bool export_points = false;
        bool export_history = true;
        std::vector<SliceRequest> slices;
        int threads = 1;

        /// Throws ConfigError naming the offending key.
        void validate() const;

        [[nodiscard]] Scene scene() const;
        [[nodiscard]] MicArray mic_array() const;
    };

    /// Frequencies start, start + step, ... up to stop (inclusive within 1e-9 relative).
    [[nodiscard]] std::vector<double> FrequencySweep(double start_hz, double stop_hz, double step_hz);

    /// Builds a configuration from parsed JSON. Unknown keys are rejected.
    [[nodiscard]] ExperimentConfig ParseConfig(const nlohmann::json &doc);

    /// Reads and parses a JSON config file; syntax errors report line and column.
    [[nodiscard]] ExperimentConfig LoadConfig(const std::filesystem::path &path);

    /// Outcome of one (frequency, method, seed) case.
    struct CaseRecord {
        double frequency_hz = 0.0;
        Method method = Method::kUniform;
        std::uint64_t seed = 0;
        double nmse_db = 0.0;
        double sparsity = 0.0;  ///< fraction of gamma below kGammaZero
        int iterations = 0;
        bool converged = true;
        double weight_integral = 1.0;  ///< sum(gamma): integral of the learned directional weight
        double objective = 0.0;  ///< final ridge objective J
        double wall_time_s = 0.0;  ///< not exported to report files
        std::vector<SubKernelParam> params;
        KernelWeights gamma;
        std::vector<double> j_history;
    };

    struct AggregateRecord {
        double frequency_hz = 0.0;
        Method method = Method::kUniform;
        std::size_t n_seeds = 0;
        double nmse_mean_db = 0.0;
        double nmse_min_db = 0.0;
        double nmse_max_db = 0.0;
        double sparsity_mean = 0.0;
        double iterations_mean = 0.0;
    };

    struct RunReport {
        /// Ordered by frequency, then method in config order, then seed in config order.
        std::vector<CaseRecord> records;
        std::vector<AggregateRecord> aggregates;
    };

    /// Aggregates over seeds for each (frequency, method), in record order.
    [[nodiscard]] std::vector<AggregateRecord> Aggregate(const std::vector<CaseRecord> &records);

    /// Runs every (frequency, seed) case, possibly on several threads. Does not write files.
    [[nodiscard]] RunReport RunExperiment(const ExperimentConfig &config);

    /// Runs one case set for a single frequency and seed; exposed for tests.
    [[nodiscard]] std::vector<CaseRecord> RunCase(
        const ExperimentConfig &config,
        double frequency_hz,
        std::uint64_t seed,
        std::vector<EstimatorState> *states = nullptr);

    enum class ReportFormat { kCsv, kJson };

    void WriteReportCsv(std::ostream &os, const RunReport &report);
    void WriteAggregateCsv(std::ostream &os, const std::vector<AggregateRecord> &aggregates);
    void WriteTimingCsv(std::ostream &os, const RunReport &report);
    void WriteGammaCsv(std::ostream &os, const CaseRecord &record);
    void WriteHistoryCsv(std::ostream &os, const CaseRecord &record);

    /// Report and aggregates as JSON with every float rounded to 9 significant digits.
    [[nodiscard]] std::string ReportToJson(const RunReport &report);
    [[nodiscard]] RunReport ReportFromJson(const std::string &text);

    /// Writes report.csv + aggregate.csv (csv) or report.json (json), plus per-case gamma and
    /// history files, into `dir`. Throws Error when the directory cannot be written.
    void ExportReport(const RunReport &report, ReportFormat format, const std::filesystem::path &dir, bool export_history = true);

    /// Runs the experiment, exports all files (csv and json) and any requested slices.
    RunReport RunAndExport(const ExperimentConfig &config);

    /// Closed form vs quadrature and identity checks on random instances.
    struct KernelCheckResult {
        int instances = 0;
        double max_diagonal_error = 0.0;
        double max_hermitian_error = 0.0;
        double max_uniform_error = 0.0;
        double max_oracle_error = 0.0;
        [[nodiscard]] bool passed() const;
    };

    [[nodiscard]] KernelCheckResult RunKernelCheck(int instances, std::uint64_t seed);

}  // namespace sfmkl
