#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sfmkl/error.hpp"
#include "sfmkl/experiment.hpp"

namespace sfmkl {

    using nlohmann::json;

    namespace {
        [[noreturn]] void
        Fail(const std::string &key, const std::string &what) {
            throw ConfigError("config key '" + key + "': " + what);
        }

        void
        RejectUnknown(const json &obj, const std::string &path, std::initializer_list<std::string_view> allowed) {
            if (!obj.is_object()) { Fail(path.empty() ? "<root>" : path, "expected an object"); }
            for (const auto &item : obj.items()) {
                bool known = false;
                for (auto a : allowed) { known = known || item.key() == a; }
                if (!known) { Fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key"); }
            }
        }

        std::string
        Join(const std::string &path, std::string_view key) {
            return path.empty() ? std::string(key) : path + "." + std::string(key);
        }

        double
        Number(const json &value, const std::string &key) {
            if (!value.is_number()) { Fail(key, "expected a number"); }
            const double v = value.get<double>();
            if (!std::isfinite(v)) { Fail(key, "expected a finite number"); }
            return v;
        }

        std::int64_t
        Integer(const json &value, const std::string &key) {
            if (!value.is_number_integer()) { Fail(key, "expected an integer"); }
            return value.get<std::int64_t>();
        }

        bool
        Boolean(const json &value, const std::string &key) {
            if (!value.is_boolean()) { Fail(key, "expected true or false"); }
            return value.get<bool>();
        }

        std::string
        String(const json &value, const std::string &key) {
            if (!value.is_string()) { Fail(key, "expected a string"); }
            return value.get<std::string>();
        }

        Position3
        Vec3(const json &value, const std::string &key) {
            if (!value.is_array() || value.size() != 3) { Fail(key, "expected an array of 3 numbers"); }
            return {Number(value[0], key + "[0]"), Number(value[1], key + "[1]"), Number(value[2], key + "[2]")};
        }

        Complex
        Amplitude(const json &value, const std::string &key) {
            if (value.is_number()) { return {Number(value, key), 0.0}; }
            if (value.is_array() && value.size() == 2) {
                return {Number(value[0], key + "[0]"), Number(value[1], key + "[1]")};
            }
            Fail(key, "expected a number or [re, im]");
        }

        std::vector<double>
        NumberList(const json &value, const std::string &key) {
            if (!value.is_array() || value.empty()) { Fail(key, "expected a non-empty array of numbers"); }
            std::vector<double> out;
            for (std::size_t i = 0; i < value.size(); ++i) { out.push_back(Number(value[i], key + "[" + std::to_string(i) + "]")); }
            return out;
        }

        template<typename F>
        void
        IfPresent(const json &obj, std::string_view key, F &&f) {
            if (auto it = obj.find(std::string(key)); it != obj.end()) { f(*it); }
        }

        void
        ParseScene(const json &node, ExperimentConfig &cfg) {
            const std::string path = "scene";
            RejectUnknown(node, path, {"speed_of_sound", "region", "sources"});
            IfPresent(node, "speed_of_sound", [&](const json &v) { cfg.speed_of_sound = Number(v, Join(path, "speed_of_sound")); });
            IfPresent(node, "region", [&](const json &v) {
                const std::string rpath = Join(path, "region");
                RejectUnknown(v, rpath, {"center", "radius"});
                IfPresent(v, "center", [&](const json &c) { cfg.region.center = Vec3(c, Join(rpath, "center")); });
                IfPresent(v, "radius", [&](const json &r) { cfg.region.radius = Number(r, Join(rpath, "radius")); });
            });
            IfPresent(node, "sources", [&](const json &v) {
                const std::string spath = Join(path, "sources");
                if (!v.is_array()) { Fail(spath, "expected an array"); }
                cfg.sources.clear();
                for (std::size_t i = 0; i < v.size(); ++i) {
                    const std::string ipath = spath + "[" + std::to_string(i) + "]";
                    RejectUnknown(v[i], ipath, {"position", "amplitude"});
                    if (!v[i].contains("position")) { Fail(Join(ipath, "position"), "missing"); }
                    PointSource src;
                    src.position = Vec3(v[i]["position"], Join(ipath, "position"));
                    IfPresent(v[i], "amplitude", [&](const json &a) { src.amplitude = Amplitude(a, Join(ipath, "amplitude")); });
                    cfg.sources.push_back(src);
                }
            });
        }

        void
        ParseArray(const json &node, ExperimentConfig &cfg) {
            const std::string path = "array";
            RejectUnknown(node, path, {"layers"});
            if (!node.contains("layers") || !node["layers"].is_array()) { Fail(Join(path, "layers"), "expected an array"); }
            cfg.layers.clear();
            const json &layers = node["layers"];
            for (std::size_t i = 0; i < layers.size(); ++i) {
                const std::string lpath = path + ".layers[" + std::to_string(i) + "]";
                RejectUnknown(layers[i], lpath, {"radius", "count", "point_set"});
                LayerConfig layer;
                IfPresent(layers[i], "radius", [&](const json &v) { layer.radius = Number(v, Join(lpath, "radius")); });
                IfPresent(layers[i], "count", [&](const json &v) {
                    const auto n = Integer(v, Join(lpath, "count"));
                    if (n < 1) { Fail(Join(lpath, "count"), "must be >= 1"); }
                    layer.count = static_cast<std::size_t>(n);
                });
                IfPresent(layers[i], "point_set", [&](const json &v) {
                    try {
                        layer.point_set = ParsePointSet(String(v, Join(lpath, "point_set")));
                    } catch (const InvalidInput &e) { Fail(Join(lpath, "point_set"), e.what()); }
                });
                cfg.layers.push_back(layer);
            }
        }

        void
        ParseBank(const json &node, ExperimentConfig &cfg) {
            const std::string path = "bank";
            RejectUnknown(node, path, {"azimuth_count", "zenith_deg", "betas", "beta_start", "beta_step", "beta_count"});
            IfPresent(node, "azimuth_count", [&](const json &v) {
                cfg.bank.azimuth_count = static_cast<int>(Integer(v, Join(path, "azimuth_count")));
            });
            IfPresent(node, "zenith_deg", [&](const json &v) {
                cfg.bank.zeniths.clear();
                for (double deg : NumberList(v, Join(path, "zenith_deg"))) { cfg.bank.zeniths.push_back(deg * kPi / 180.0); }
            });
            const bool has_list = node.contains("betas");
            const bool has_range = node.contains("beta_start") || node.contains("beta_step") || node.contains("beta_count");
            if (has_list && has_range) { Fail(Join(path, "betas"), "give either betas or beta_start/beta_step/beta_count"); }
            if (has_list) { cfg.bank.betas = NumberList(node["betas"], Join(path, "betas")); }
            if (has_range) {
                double start = 0.0;
                double step = 1.0;
                std::int64_t count = 10;
                IfPresent(node, "beta_start", [&](const json &v) { start = Number(v, Join(path, "beta_start")); });
                IfPresent(node, "beta_step", [&](const json &v) { step = Number(v, Join(path, "beta_step")); });
                IfPresent(node, "beta_count", [&](const json &v) { count = Integer(v, Join(path, "beta_count")); });
                if (count < 1) { Fail(Join(path, "beta_count"), "must be >= 1"); }
                cfg.bank.betas.clear();
                for (std::int64_t i = 0; i < count; ++i) { cfg.bank.betas.push_back(start + static_cast<double>(i) * step); }
            }
        }

        void
        ParseSweep(const json &node, ExperimentConfig &cfg) {
            const std::string path = "sweep";
            RejectUnknown(node, path, {"start_hz", "stop_hz", "step_hz", "frequencies_hz"});
            if (node.contains("frequencies_hz")) {
                if (node.contains("start_hz") || node.contains("stop_hz") || node.contains("step_hz")) {
                    Fail(Join(path, "frequencies_hz"), "give either frequencies_hz or start_hz/stop_hz/step_hz");
                }
                cfg.frequencies = NumberList(node["frequencies_hz"], Join(path, "frequencies_hz"));
                return;
            }
            double start = 100.0;
            double stop = 1000.0;
            double step = 100.0;
            IfPresent(node, "start_hz", [&](const json &v) { start = Number(v, Join(path, "start_hz")); });
            IfPresent(node, "stop_hz", [&](const json &v) { stop = Number(v, Join(path, "stop_hz")); });
            IfPresent(node, "step_hz", [&](const json &v) { step = Number(v, Join(path, "step_hz")); });
            try {
                cfg.frequencies = FrequencySweep(start, stop, step);
            } catch (const InvalidInput &e) { Fail(path, e.what()); }
        }

        std::pair<std::size_t, std::size_t>
        LineColumn(const std::string &text, std::size_t byte) {
            std::size_t line = 1;
            std::size_t col = 1;
            for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
                if (text[i] == '\n') {
                    ++line;
                    col = 1;
                } else {
                    ++col;
                }
            }
            return {line, col};
        }
    }  // namespace

    std::vector<double>
    FrequencySweep(double start_hz, double stop_hz, double step_hz) {
        if (!(start_hz > 0.0) || !(step_hz > 0.0) || stop_hz < start_hz) {
            throw InvalidInput("frequency sweep needs 0 < start <= stop and step > 0");
        }
        std::vector<double> out;
        for (int i = 0;; ++i) {
            const double f = start_hz + i * step_hz;
            if (f > stop_hz * (1.0 + 1e-9)) { break; }
            out.push_back(f);
        }
        return out;
    }

    ExperimentConfig
    ParseConfig(const json &doc) {
        RejectUnknown(
            doc,
            "",
            {"scene", "array", "bank", "lambda", "methods", "sweep", "snr_db", "seeds", "grid_spacing", "l1", "l2", "output", "slices",
             "threads"});

        ExperimentConfig cfg;
        cfg.frequencies = FrequencySweep(100.0, 1000.0, 100.0);
        if (!doc.contains("scene")) { Fail("scene", "missing"); }
        ParseScene(doc["scene"], cfg);
        if (!doc.contains("array")) { Fail("array", "missing"); }
        ParseArray(doc["array"], cfg);
        IfPresent(doc, "bank", [&](const json &v) { ParseBank(v, cfg); });
        IfPresent(doc, "lambda", [&](const json &v) { cfg.lambda = Number(v, "lambda"); });
        IfPresent(doc, "methods", [&](const json &v) {
            if (!v.is_array()) { Fail("methods", "expected an array of method names"); }
            cfg.methods.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const std::string key = "methods[" + std::to_string(i) + "]";
                try {
                    cfg.methods.push_back(ParseMethod(String(v[i], key)));
                } catch (const InvalidInput &e) { Fail(key, e.what()); }
            }
        });
        IfPresent(doc, "sweep", [&](const json &v) { ParseSweep(v, cfg); });
        IfPresent(doc, "snr_db", [&](const json &v) {
            if (!v.is_null()) { cfg.snr_db = Number(v, "snr_db"); }
        });
        IfPresent(doc, "seeds", [&](const json &v) {
            if (!v.is_array()) { Fail("seeds", "expected an array of non-negative integers"); }
            cfg.seeds.clear();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const auto seed = Integer(v[i], "seeds[" + std::to_string(i) + "]");
                if (seed < 0) { Fail("seeds[" + std::to_string(i) + "]", "must be >= 0"); }
                cfg.seeds.push_back(static_cast<std::uint64_t>(seed));
            }
        });
        IfPresent(doc, "grid_spacing", [&](const json &v) { cfg.grid_spacing = Number(v, "grid_spacing"); });
        IfPresent(doc, "l1", [&](const json &v) {
            RejectUnknown(v, "l1", {"max_outer_iters", "j_rel_tol", "gamma_tol", "line_search_iters"});
            IfPresent(v, "max_outer_iters", [&](const json &x) { cfg.l1.max_outer_iters = static_cast<int>(Integer(x, "l1.max_outer_iters")); });
            IfPresent(v, "j_rel_tol", [&](const json &x) { cfg.l1.j_rel_tol = Number(x, "l1.j_rel_tol"); });
            IfPresent(v, "gamma_tol", [&](const json &x) { cfg.l1.gamma_tol = Number(x, "l1.gamma_tol"); });
            IfPresent(v, "line_search_iters", [&](const json &x) {
                cfg.l1.line_search_iters = static_cast<int>(Integer(x, "l1.line_search_iters"));
            });
        });
        IfPresent(doc, "l2", [&](const json &v) {
            RejectUnknown(v, "l2", {"max_iters", "sigma", "gamma_rel_tol"});
            IfPresent(v, "max_iters", [&](const json &x) { cfg.l2.max_iters = static_cast<int>(Integer(x, "l2.max_iters")); });
            IfPresent(v, "sigma", [&](const json &x) { cfg.l2.sigma = Number(x, "l2.sigma"); });
            IfPresent(v, "gamma_rel_tol", [&](const json &x) { cfg.l2.gamma_rel_tol = Number(x, "l2.gamma_rel_tol"); });
        });
        IfPresent(doc, "output", [&](const json &v) {
            RejectUnknown(v, "output", {"dir", "export_points", "export_history"});
            IfPresent(v, "dir", [&](const json &x) { cfg.output_dir = String(x, "output.dir"); });
            IfPresent(v, "export_points", [&](const json &x) { cfg.export_points = Boolean(x, "output.export_points"); });
            IfPresent(v, "export_history", [&](const json &x) { cfg.export_history = Boolean(x, "output.export_history"); });
        });
        IfPresent(doc, "slices", [&](const json &v) {
            if (!v.is_array()) { Fail("slices", "expected an array"); }
            for (std::size_t i = 0; i < v.size(); ++i) {
                const std::string key = "slices[" + std::to_string(i) + "]";
                RejectUnknown(v[i], key, {"plane", "spacing"});
                SliceRequest req;
                if (!v[i].contains("plane")) { Fail(Join(key, "plane"), "missing"); }
                try {
                    req.plane = ParsePlane(String(v[i]["plane"], Join(key, "plane")));
                } catch (const InvalidInput &e) { Fail(Join(key, "plane"), e.what()); }
                IfPresent(v[i], "spacing", [&](const json &x) { req.spacing = Number(x, Join(key, "spacing")); });
                cfg.slices.push_back(req);
            }
        });
        IfPresent(doc, "threads", [&](const json &v) { cfg.threads = static_cast<int>(Integer(v, "threads")); });

        cfg.validate();
        return cfg;
    }

    ExperimentConfig
    LoadConfig(const std::filesystem::path &path) {
        std::ifstream in(path);
        if (!in) { throw ConfigError("cannot open config file '" + path.string() + "'"); }
        std::stringstream buffer;
        buffer << in.rdbuf();
        const std::string text = buffer.str();
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error &e) {
            const auto [line, col] = LineColumn(text, e.byte);
            throw ConfigError(
                path.string() + ":" + std::to_string(line) + ":" + std::to_string(col) + ": syntax error: " + e.what());
        }
        try {
            return ParseConfig(doc);
        } catch (const ConfigError &e) { throw ConfigError(path.string() + ": " + e.what()); }
    }

    void
    ExperimentConfig::validate() const {
        if (!(speed_of_sound > 0.0)) { Fail("scene.speed_of_sound", "must be > 0"); }
        if (!(region.radius > 0.0)) { Fail("scene.region.radius", "must be > 0"); }
        if (sources.empty()) { Fail("scene.sources", "at least one source is required"); }
        if (layers.empty()) { Fail("array.layers", "at least one layer is required"); }
        for (std::size_t i = 0; i < layers.size(); ++i) {
            if (!(layers[i].radius > 0.0)) { Fail("array.layers[" + std::to_string(i) + "].radius", "must be > 0"); }
        }
        if (bank.azimuth_count < 1) { Fail("bank.azimuth_count", "must be >= 1"); }
        for (double b : bank.betas) {
            if (b < 0.0) { Fail("bank.betas", "beta values must be >= 0"); }
        }
        if (!(lambda > 0.0)) { Fail("lambda", "must be > 0"); }
        if (methods.empty()) { Fail("methods", "at least one method is required"); }
        if (std::set<Method>(methods.begin(), methods.end()).size() != methods.size()) { Fail("methods", "duplicate method"); }
        if (frequencies.empty()) { Fail("sweep", "no frequencies"); }
        for (double f : frequencies) {
            if (!(f > 0.0)) { Fail("sweep", "frequencies must be > 0"); }
        }
        if (seeds.empty()) { Fail("seeds", "at least one seed is required"); }
        if (!(grid_spacing > 0.0) || grid_spacing > 2.0 * region.radius) { Fail("grid_spacing", "must lie in (0, 2 * radius]"); }
        if (threads < 1) { Fail("threads", "must be >= 1"); }
        for (const auto &s : slices) {
            if (!(s.spacing > 0.0)) { Fail("slices.spacing", "must be > 0"); }
        }
        try {
            l1.validate();
        } catch (const InvalidInput &e) { Fail("l1", e.what()); }
        try {
            l2.validate();
        } catch (const InvalidInput &e) { Fail("l2", e.what()); }
        try {
            (void) scene();
            (void) mic_array();
        } catch (const InvalidInput &e) { Fail("scene/array", e.what()); }
    }

    Scene
    ExperimentConfig::scene() const {
        return Scene(sources, speed_of_sound, region);
    }

    MicArray
    ExperimentConfig::mic_array() const {
        std::optional<MicArray> all;
        for (const auto &layer : layers) {
            MicArray part = SphericalLayerLayout(layer.count, layer.radius, layer.point_set);
            all = all ? all->concat(part) : std::move(part);
        }
        if (!all) { throw InvalidInput("no microphone layers"); }
        // layers are centred on the origin; shift them onto the region center
        if (region.center.isZero()) { return *all; }
        std::vector<Position3> shifted(all->positions().begin(), all->positions().end());
        for (auto &p : shifted) { p += region.center; }
        return MicArray(std::move(shifted));
    }

}  // namespace sfmkl
