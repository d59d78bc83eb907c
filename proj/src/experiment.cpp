#include "sfmkl/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "sfmkl/error.hpp"
#include "sfmkl/format.hpp"

namespace sfmkl {

    using nlohmann::json;

    namespace {
        double
        Round9(double v) {
            return std::stod(FormatDouble(v));
        }

        std::string
        CaseStem(const CaseRecord &r) {
            return FormatDouble(r.frequency_hz) + "_" + std::string(ToString(r.method)) + "_" + std::to_string(r.seed);
        }

        std::ofstream
        OpenOut(const std::filesystem::path &path) {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out) { throw Error("cannot write '" + path.string() + "'"); }
            return out;
        }

        KernelBank
        UniformBank(double wavenumber) {
            return KernelBank({SubKernelParam{Position3::UnitX(), 0.0}}, wavenumber);
        }
    }  // namespace

    Method
    ParseMethod(std::string_view name) {
        if (name == "uniform" || name == "baseline") { return Method::kUniform; }
        if (name == "l1") { return Method::kL1; }
        if (name == "l2") { return Method::kL2; }
        throw InvalidInput("unknown method '" + std::string(name) + "' (expected uniform, l1 or l2)");
    }

    std::string_view
    ToString(Method method) {
        switch (method) {
            case Method::kUniform:
                return "uniform";
            case Method::kL1:
                return "l1";
            case Method::kL2:
                return "l2";
        }
        return "unknown";
    }

    std::vector<CaseRecord>
    RunCase(const ExperimentConfig &config, double frequency_hz, std::uint64_t seed, std::vector<EstimatorState> *states) {
        const Scene scene = config.scene();
        const MicArray mics = config.mic_array();
        const Observation obs = Observe(scene, mics, frequency_hz, config.snr_db, seed);
        const EvalGrid grid = MakeGrid(scene.target_region(), config.grid_spacing);
        const ComplexVector u_true = TrueField(scene, grid.points, frequency_hz);
        const double k = scene.wavenumber(frequency_hz);

        std::optional<KernelBank> bank;
        std::optional<GramSet> grams;
        auto learned_bank = [&]() -> const GramSet & {
            if (!grams) {
                bank = MakeBank(config.bank, k);
                grams = BuildGramSet(mics, *bank);
            }
            return *grams;
        };

        std::vector<CaseRecord> records;
        for (Method method : config.methods) {
            try {
                const auto t0 = std::chrono::steady_clock::now();
                CaseRecord rec;
                rec.frequency_hz = frequency_hz;
                rec.method = method;
                rec.seed = seed;

                std::optional<EstimatorState> state;
                if (method == Method::kUniform) {
                    KernelBank ubank = UniformBank(k);
                    const GramSet ugrams = BuildGramSet(mics, ubank);
                    const RidgeFit fit = FitRidge(ugrams[0], obs.values, config.lambda);
                    rec.iterations = 0;
                    rec.converged = true;
                    rec.objective = fit.objective;
                    rec.j_history = {fit.objective};
                    rec.params.assign(ubank.params().begin(), ubank.params().end());
                    rec.gamma = KernelWeights::Ones(1);
                    state.emplace(fit.alpha, mics, std::move(ubank), rec.gamma);
                } else {
                    const GramSet &g = learned_bank();
                    MklResult res = method == Method::kL1 ? SolveL1(g, obs.values, config.lambda, config.l1)
                                                          : SolveL2(g, obs.values, config.lambda, config.l2);
                    rec.iterations = res.iterations;
                    rec.converged = res.converged;
                    rec.objective = res.j_history.back();
                    rec.j_history = std::move(res.j_history);
                    rec.params.assign(bank->params().begin(), bank->params().end());
                    rec.gamma = res.gamma;
                    state.emplace(std::move(res.alpha), mics, *bank, std::move(res.gamma));
                }
                rec.sparsity = SparsityFraction(rec.gamma);
                rec.weight_integral = rec.gamma.sum();

                const ComplexVector u_est = EstimateField(*state, grid.points);
                rec.nmse_db = NmseDb(u_true, u_est);
                rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

                if (config.export_points) {
                    std::filesystem::create_directories(config.output_dir);
                    auto out = OpenOut(config.output_dir / ("points_" + CaseStem(rec) + ".csv"));
                    WritePointsCsv(out, grid.points, u_true, u_est);
                }
                records.push_back(std::move(rec));
                if (states) { states->push_back(std::move(*state)); }
            } catch (const Error &e) {
                throw Error("method " + std::string(ToString(method)) + ": " + e.what());
            }
        }
        return records;
    }

    std::vector<AggregateRecord>
    Aggregate(const std::vector<CaseRecord> &records) {
        std::vector<AggregateRecord> out;
        std::vector<std::vector<const CaseRecord *>> groups;
        for (const auto &r : records) {
            std::size_t g = 0;
            for (; g < out.size(); ++g) {
                if (out[g].frequency_hz == r.frequency_hz && out[g].method == r.method) { break; }
            }
            if (g == out.size()) {
                out.push_back({r.frequency_hz, r.method});
                groups.emplace_back();
            }
            groups[g].push_back(&r);
        }
        for (std::size_t g = 0; g < out.size(); ++g) {
            auto &agg = out[g];
            agg.n_seeds = groups[g].size();
            agg.nmse_min_db = groups[g].front()->nmse_db;
            agg.nmse_max_db = groups[g].front()->nmse_db;
            double nmse = 0.0;
            double sparsity = 0.0;
            double iters = 0.0;
            for (const auto *r : groups[g]) {
                nmse += r->nmse_db;
                sparsity += r->sparsity;
                iters += r->iterations;
                agg.nmse_min_db = std::min(agg.nmse_min_db, r->nmse_db);
                agg.nmse_max_db = std::max(agg.nmse_max_db, r->nmse_db);
            }
            const auto n = static_cast<double>(agg.n_seeds);
            agg.nmse_mean_db = nmse / n;
            agg.sparsity_mean = sparsity / n;
            agg.iterations_mean = iters / n;
        }
        return out;
    }

    RunReport
    RunExperiment(const ExperimentConfig &config) {
        config.validate();
        const std::size_t n_freq = config.frequencies.size();
        const std::size_t n_seed = config.seeds.size();
        const std::size_t n_tasks = n_freq * n_seed;

        std::vector<std::vector<CaseRecord>> results(n_tasks);
        std::vector<std::exception_ptr> errors(n_tasks);
        std::atomic<std::size_t> next{0};

        auto worker = [&]() {
            for (std::size_t t = next++; t < n_tasks; t = next++) {
                const double f = config.frequencies[t / n_seed];
                const std::uint64_t seed = config.seeds[t % n_seed];
                try {
                    results[t] = RunCase(config, f, seed);
                } catch (const std::exception &e) {
                    errors[t] = std::make_exception_ptr(
                        Error("frequency " + FormatDouble(f) + " Hz, seed " + std::to_string(seed) + ": " + e.what()));
                }
            }
        };

        const auto n_threads = static_cast<std::size_t>(std::max(1, config.threads));
        if (n_threads == 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t i = 0; i < std::min(n_threads, n_tasks); ++i) { pool.emplace_back(worker); }
        }
        for (auto &e : errors) {
            if (e) { std::rethrow_exception(e); }
        }

        // task order is (frequency, seed); reports list (frequency, method, seed)
        RunReport report;
        for (std::size_t fi = 0; fi < n_freq; ++fi) {
            for (std::size_t mi = 0; mi < config.methods.size(); ++mi) {
                for (std::size_t si = 0; si < n_seed; ++si) { report.records.push_back(results[fi * n_seed + si][mi]); }
            }
        }
        report.aggregates = Aggregate(report.records);
        return report;
    }

    void
    WriteReportCsv(std::ostream &os, const RunReport &report) {
        os << "frequency_hz,method,seed,nmse_db,sparsity,iterations,converged,weight_integral,objective\n";
        for (const auto &r : report.records) {
            os << FormatDouble(r.frequency_hz) << ',' << ToString(r.method) << ',' << r.seed << ',' << FormatDouble(r.nmse_db) << ','
               << FormatDouble(r.sparsity) << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << ','
               << FormatDouble(r.weight_integral) << ',' << FormatDouble(r.objective) << '\n';
        }
    }

    void
    WriteAggregateCsv(std::ostream &os, const std::vector<AggregateRecord> &aggregates) {
        os << "frequency_hz,method,n_seeds,nmse_mean_db,nmse_min_db,nmse_max_db,sparsity_mean,iterations_mean\n";
        for (const auto &a : aggregates) {
            os << FormatDouble(a.frequency_hz) << ',' << ToString(a.method) << ',' << a.n_seeds << ',' << FormatDouble(a.nmse_mean_db)
               << ',' << FormatDouble(a.nmse_min_db) << ',' << FormatDouble(a.nmse_max_db) << ',' << FormatDouble(a.sparsity_mean)
               << ',' << FormatDouble(a.iterations_mean) << '\n';
        }
    }

    void
    WriteTimingCsv(std::ostream &os, const RunReport &report) {
        os << "frequency_hz,method,seed,wall_time_s\n";
        for (const auto &r : report.records) {
            os << FormatDouble(r.frequency_hz) << ',' << ToString(r.method) << ',' << r.seed << ',' << FormatDouble(r.wall_time_s) << '\n';
        }
    }

    void
    WriteGammaCsv(std::ostream &os, const CaseRecord &record) {
        if (record.params.size() != static_cast<std::size_t>(record.gamma.size())) {
            throw InvalidInput("WriteGammaCsv: record carries no sub-kernel parameters");
        }
        os << "index,azimuth_rad,zenith_rad,beta,gamma\n";
        for (std::size_t d = 0; d < record.params.size(); ++d) {
            const auto &p = record.params[d];
            os << d << ',' << FormatDouble(p.azimuth()) << ',' << FormatDouble(p.zenith()) << ',' << FormatDouble(p.beta) << ','
               << FormatDouble(record.gamma[static_cast<Eigen::Index>(d)]) << '\n';
        }
    }

    void
    WriteHistoryCsv(std::ostream &os, const CaseRecord &record) {
        os << "iteration,objective\n";
        for (std::size_t i = 0; i < record.j_history.size(); ++i) { os << i << ',' << FormatDouble(record.j_history[i]) << '\n'; }
    }

    std::string
    ReportToJson(const RunReport &report) {
        json doc;
        doc["records"] = json::array();
        for (const auto &r : report.records) {
            json gamma = json::array();
            for (double g : r.gamma) { gamma.push_back(Round9(g)); }
            doc["records"].push_back({
                {"frequency_hz", Round9(r.frequency_hz)},
                {"method", ToString(r.method)},
                {"seed", r.seed},
                {"nmse_db", Round9(r.nmse_db)},
                {"sparsity", Round9(r.sparsity)},
                {"iterations", r.iterations},
                {"converged", r.converged},
                {"weight_integral", Round9(r.weight_integral)},
                {"objective", Round9(r.objective)},
                {"gamma", std::move(gamma)},
            });
        }
        doc["aggregates"] = json::array();
        for (const auto &a : report.aggregates) {
            doc["aggregates"].push_back({
                {"frequency_hz", Round9(a.frequency_hz)},
                {"method", ToString(a.method)},
                {"n_seeds", a.n_seeds},
                {"nmse_mean_db", Round9(a.nmse_mean_db)},
                {"nmse_min_db", Round9(a.nmse_min_db)},
                {"nmse_max_db", Round9(a.nmse_max_db)},
                {"sparsity_mean", Round9(a.sparsity_mean)},
                {"iterations_mean", Round9(a.iterations_mean)},
            });
        }
        return doc.dump(2) + "\n";
    }

    RunReport
    ReportFromJson(const std::string &text) {
        RunReport report;
        try {
            const json doc = json::parse(text);
            for (const auto &r : doc.at("records")) {
                CaseRecord rec;
                rec.frequency_hz = r.at("frequency_hz").get<double>();
                rec.method = ParseMethod(r.at("method").get<std::string>());
                rec.seed = r.at("seed").get<std::uint64_t>();
                rec.nmse_db = r.at("nmse_db").get<double>();
                rec.sparsity = r.at("sparsity").get<double>();
                rec.iterations = r.at("iterations").get<int>();
                rec.converged = r.at("converged").get<bool>();
                rec.weight_integral = r.at("weight_integral").get<double>();
                rec.objective = r.at("objective").get<double>();
                const auto &g = r.at("gamma");
                rec.gamma.resize(static_cast<Eigen::Index>(g.size()));
                for (std::size_t i = 0; i < g.size(); ++i) { rec.gamma[static_cast<Eigen::Index>(i)] = g[i].get<double>(); }
                report.records.push_back(std::move(rec));
            }
            for (const auto &a : doc.at("aggregates")) {
                AggregateRecord agg;
                agg.frequency_hz = a.at("frequency_hz").get<double>();
                agg.method = ParseMethod(a.at("method").get<std::string>());
                agg.n_seeds = a.at("n_seeds").get<std::size_t>();
                agg.nmse_mean_db = a.at("nmse_mean_db").get<double>();
                agg.nmse_min_db = a.at("nmse_min_db").get<double>();
                agg.nmse_max_db = a.at("nmse_max_db").get<double>();
                agg.sparsity_mean = a.at("sparsity_mean").get<double>();
                agg.iterations_mean = a.at("iterations_mean").get<double>();
                report.aggregates.push_back(agg);
            }
        } catch (const json::exception &e) { throw InvalidInput(std::string("ReportFromJson: ") + e.what()); }
        return report;
    }

    void
    ExportReport(const RunReport &report, ReportFormat format, const std::filesystem::path &dir, bool export_history) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec) { throw Error("cannot create output directory '" + dir.string() + "': " + ec.message()); }

        if (format == ReportFormat::kCsv) {
            auto report_csv = OpenOut(dir / "report.csv");
            WriteReportCsv(report_csv, report);
            auto aggregate_csv = OpenOut(dir / "aggregate.csv");
            WriteAggregateCsv(aggregate_csv, report.aggregates);
        } else {
            auto report_json = OpenOut(dir / "report.json");
            report_json << ReportToJson(report);
        }

        for (const auto &r : report.records) {
            if (!r.params.empty()) {
                auto gamma_csv = OpenOut(dir / ("gamma_" + CaseStem(r) + ".csv"));
                WriteGammaCsv(gamma_csv, r);
            }
            if (export_history && !r.j_history.empty()) {
                auto history_csv = OpenOut(dir / ("history_" + CaseStem(r) + ".csv"));
                WriteHistoryCsv(history_csv, r);
            }
        }
    }

    RunReport
    RunAndExport(const ExperimentConfig &config) {
        RunReport report = RunExperiment(config);
        ExportReport(report, ReportFormat::kCsv, config.output_dir, config.export_history);
        ExportReport(report, ReportFormat::kJson, config.output_dir, false);
        auto timing = OpenOut(config.output_dir / "timing.csv");
        WriteTimingCsv(timing, report);

        if (!config.slices.empty()) {
            const Scene scene = config.scene();
            for (double f : config.frequencies) {
                for (std::uint64_t seed : config.seeds) {
                    std::vector<EstimatorState> states;
                    const auto records = RunCase(config, f, seed, &states);
                    for (std::size_t i = 0; i < records.size(); ++i) {
                        for (const auto &req : config.slices) {
                            const FieldSlice slice = ErrorSlice(states[i], scene, f, req.plane, req.spacing);
                            const std::string plane_tag = std::string(1, "xyz"[req.plane.axis]) + FormatDouble(req.plane.offset);
                            auto out = OpenOut(config.output_dir / ("slice_" + plane_tag + "_" + CaseStem(records[i]) + ".csv"));
                            WriteSliceCsv(out, slice);
                        }
                    }
                }
            }
        }
        return report;
    }

    bool
    KernelCheckResult::passed() const {
        return max_diagonal_error < 1e-10 && max_hermitian_error < 1e-12 && max_uniform_error < 1e-12 && max_oracle_error < 1e-6;
    }

    KernelCheckResult
    RunKernelCheck(int instances, std::uint64_t seed) {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::uniform_real_distribution<double> beta_dist(0.0, 9.0);
        std::uniform_real_distribution<double> kd_dist(0.0, 20.0);
        auto random_dir = [&]() {
            Position3 v;
            do {
                v = Position3(unit(rng), unit(rng), unit(rng));
            } while (v.norm() < 1e-3 || v.norm() > 1.0);
            return v.normalized();
        };

        KernelCheckResult res;
        res.instances = instances;
        const double k = 2.0 * kPi * 900.0 / 340.0;
        for (int i = 0; i < instances; ++i) {
            const SubKernelParam param{random_dir(), beta_dist(rng)};
            const Position3 r1(unit(rng), unit(rng), unit(rng));
            const double kd = kd_dist(rng);
            const Position3 r2 = r1 + (kd / k) * random_dir();

            res.max_diagonal_error = std::max(res.max_diagonal_error, std::abs(KappaDirectional(r1, r1, param, k) - 1.0));
            res.max_hermitian_error = std::max(
                res.max_hermitian_error,
                std::abs(KappaDirectional(r1, r2, param, k) - std::conj(KappaDirectional(r2, r1, param, k))));
            const SubKernelParam flat{param.eta, 0.0};
            res.max_uniform_error = std::max(
                res.max_uniform_error, std::abs(KappaDirectional(r1, r2, flat, k) - SphericalJ0(Complex(k * (r1 - r2).norm(), 0.0))));
            const int order = RecommendedQuadratureOrder(kd, param.beta);
            res.max_oracle_error = std::max(
                res.max_oracle_error, std::abs(KappaDirectional(r1, r2, param, k) - KappaQuadratureOracle(r1, r2, param, k, order)));
        }
        return res;
    }

}  // namespace sfmkl
