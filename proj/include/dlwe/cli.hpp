#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dlwe/io.hpp"

namespace dlwe {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitComputeError = 3;

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Run configuration: a JSON file plus flag overrides resolve into this.
struct RunConfig {
    std::vector<long> partition;
    Rational b{1, 2};
    Rational omega{1, 2};
    std::array<Complexq, 3> gamma{};
    Rational t{10};
    std::optional<GridWindow> grid;
    DetectParams detect;
    ClassifyParams classify;
    PredictParams predict;
    PatternParams pattern;
    std::string out_dir = "out";

    SolutionSpec make_spec() const {
        if (partition.empty()) throw ConfigError("no partition given");
        for (long p : partition)
            if (p < 1) throw ConfigError("partition parts must be positive integers");
        return SolutionSpec(Partition(partition), b, omega, gamma);
    }
};

inline std::vector<long> parse_partition_list(const std::string &text) {
    std::vector<long> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) parts.push_back(std::stol(item));
    if (parts.empty()) throw ConfigError("could not parse partition '" + text + "'");
    return parts;
}

inline GridWindow parse_grid_spec(const std::string &text) {
    std::vector<std::string> f;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 6) throw ConfigError("grid spec needs rmin,rmax,smin,smax,nr,ns");
    GridWindow w;
    w.r_min = std::stod(f[0]);
    w.r_max = std::stod(f[1]);
    w.s_min = std::stod(f[2]);
    w.s_max = std::stod(f[3]);
    w.nr = static_cast<std::size_t>(std::stoul(f[4]));
    w.ns = static_cast<std::size_t>(std::stoul(f[5]));
    if (w.r_min >= w.r_max || w.s_min >= w.s_max || w.nr < 2 || w.ns < 2)
        throw ConfigError("degenerate grid window");
    return w;
}

inline Rational json_rational(const json &v) {
    if (v.is_string()) return parse_rational(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<long>());
    if (v.is_number_float()) return Rational(v.get<double>());
    throw ConfigError("expected a rational (string \"p/q\" or number)");
}

/// Applies a JSON config document onto the defaults.
inline void apply_config_json(RunConfig &cfg, const json &doc) {
    if (doc.contains("partition")) cfg.partition = doc["partition"].get<std::vector<long>>();
    if (doc.contains("b")) cfg.b = json_rational(doc["b"]);
    if (doc.contains("omega")) cfg.omega = json_rational(doc["omega"]);
    if (doc.contains("t")) cfg.t = json_rational(doc["t"]);
    if (doc.contains("gamma")) {
        const json &g = doc["gamma"];
        for (std::size_t k = 0; k < std::min<std::size_t>(3, g.size()); ++k)
            cfg.gamma[k] = Complexq(json_rational(g[k][0]), json_rational(g[k][1]));
    }
    if (doc.contains("grid")) {
        const json &g = doc["grid"];
        GridWindow w;
        w.r_min = g.at("r_min").get<double>();
        w.r_max = g.at("r_max").get<double>();
        w.s_min = g.at("s_min").get<double>();
        w.s_max = g.at("s_max").get<double>();
        w.nr = g.value("nr", 301);
        w.ns = g.value("ns", 301);
        cfg.grid = w;
    }
    if (doc.contains("detect")) {
        const json &d = doc["detect"];
        cfg.detect.threshold_rel = d.value("threshold_rel", cfg.detect.threshold_rel);
        cfg.detect.dedup_cells = d.value("dedup_cells", cfg.detect.dedup_cells);
        cfg.detect.newton_max_iter = d.value("newton_max_iter", cfg.detect.newton_max_iter);
        cfg.detect.grad_tol = d.value("grad_tol", cfg.detect.grad_tol);
    }
    if (doc.contains("classify")) {
        const json &c = doc["classify"];
        cfg.classify.band_coeff = c.value("band_coeff", cfg.classify.band_coeff);
        cfg.classify.link_coeff = c.value("link_coeff", cfg.classify.link_coeff);
    }
    if (doc.contains("predict")) {
        const json &p = doc["predict"];
        cfg.predict.window_coeff = p.value("window_coeff", cfg.predict.window_coeff);
        cfg.predict.seeds_per_axis_factor = p.value("seeds_per_axis_factor", cfg.predict.seeds_per_axis_factor);
        cfg.predict.core_coeff = p.value("core_coeff", cfg.predict.core_coeff);
        cfg.predict.dedup_frac = p.value("dedup_frac", cfg.predict.dedup_frac);
        cfg.predict.newton_max_iter = p.value("newton_max_iter", cfg.predict.newton_max_iter);
    }
    if (doc.contains("pattern")) {
        const json &p = doc["pattern"];
        cfg.pattern.mirror_tol_frac = p.value("mirror_tol_frac", cfg.pattern.mirror_tol_frac);
        cfg.pattern.lattice_rms_frac = p.value("lattice_rms_frac", cfg.pattern.lattice_rms_frac);
    }
    if (doc.contains("out")) cfg.out_dir = doc["out"].get<std::string>();
}

inline void load_config_file(RunConfig &cfg, const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const std::exception &e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    apply_config_json(cfg, doc);
}

inline void write_text_file(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
}

/// `info`: partition report (degree vector, conjugate, M, classification,
/// Young diagram) as text or JSON.
inline json info_json(const SolutionSpec &spec) {
    json cls = json::array();
    for (SpecialShape s : classify_special(spec.lam)) cls.push_back(to_string(s));
    return json{{"partition", spec.lam.parts()},
                {"N", spec.N},
                {"n", spec.n},
                {"m", spec.m.entries()},
                {"mn", spec.mn},
                {"M", spec.M},
                {"conjugate", conjugate(spec.lam).parts()},
                {"classification", cls},
                {"young_diagram", render_young_diagram(spec.lam)}};
}

inline int cmd_info(const RunConfig &cfg, std::ostream &out, bool as_json) {
    SolutionSpec spec = cfg.make_spec();
    if (as_json) {
        out << info_json(spec).dump(2) << "\n";
        return kExitOk;
    }
    out << "partition: (";
    for (std::size_t k = 0; k < spec.lam.size(); ++k)
        out << (k ? "," : "") << spec.lam.part(k);
    out << ")  N=" << spec.N << "  n=" << spec.n << "\n";
    out << "degree vector m: (";
    for (std::size_t k = 0; k < spec.m.size(); ++k) out << (k ? "," : "") << spec.m.entry(k);
    out << ")  mn=" << spec.mn << "\n";
    out << "lumps M = N + n*mn = " << spec.M << "\n";
    out << "conjugate: (";
    auto conj = conjugate(spec.lam).parts();
    for (std::size_t k = 0; k < conj.size(); ++k) out << (k ? "," : "") << conj[k];
    out << ")\nclassification:";
    for (SpecialShape s : classify_special(spec.lam)) out << " " << to_string(s);
    out << "\nYoung diagram:\n" << render_young_diagram(spec.lam);
    return kExitOk;
}

/// `field`: evaluates the field grid, writes field.csv + field_meta.json.
inline int cmd_field(const RunConfig &cfg) {
    auto start = std::chrono::steady_clock::now();
    SolutionSpec spec = cfg.make_spec();
    TauPolynomial tau = build_tau(spec);
    FieldSlice slice(tau, cfg.t);
    GridWindow window = cfg.grid ? *cfg.grid : auto_window(spec, cfg.t.get_d());
    FieldGrid grid = grid_eval(slice, window);

    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    {
        std::ofstream csv(dir / "field.csv", std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write field.csv");
        grid_to_csv(grid, csv);
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    json singular = json::array();
    for (auto [i, j] : grid.singular_nodes) singular.push_back({i, j});
    json meta{{"spec", spec_to_json(spec)},
              {"t", to_string(cfg.t)},
              {"window", {{"r_min", window.r_min}, {"r_max", window.r_max},
                          {"s_min", window.s_min}, {"s_max", window.s_max},
                          {"nr", window.nr}, {"ns", window.ns}}},
              {"tau_rs_degree", tau.poly.rs_degree()},
              {"tau_terms", tau.poly.term_count()},
              {"singular_nodes", singular},
              {"elapsed_seconds", elapsed}};
    write_text_file(dir / "field_meta.json", meta.dump(2) + "\n");
    return grid.singular_nodes.size() == grid.v.size() ? kExitComputeError : kExitOk;
}

/// `peaks`: detection + group classification, writes peaks.json.
inline int cmd_peaks(const RunConfig &cfg) {
    SolutionSpec spec = cfg.make_spec();
    TauPolynomial tau = build_tau(spec);
    FieldSlice slice(tau, cfg.t);
    GridWindow window = cfg.grid ? *cfg.grid : auto_window(spec, cfg.t.get_d());
    FieldGrid grid = grid_eval(slice, window);
    PeakMap map = detect_peaks(grid, slice, cfg.detect);
    classify_groups(map, cfg.classify);

    std::filesystem::path dir(cfg.out_dir);
    write_text_file(dir / "peaks.json", peakmap_to_json(map).dump(2) + "\n");
    return kExitOk;
}

/// `predict`: root-based peak prediction + pattern checks; with compare,
/// also detects and writes the matching table.
inline int cmd_predict(const RunConfig &cfg, bool compare) {
    SolutionSpec spec = cfg.make_spec();
    PredictParams pp = cfg.predict;
    pp.window = cfg.grid;
    PeakMap predicted = predict_peaks(spec, cfg.t, pp);
    classify_groups(predicted, cfg.classify);
    PatternReport report = pattern_checks(predicted, cfg.pattern);

    std::filesystem::path dir(cfg.out_dir);
    write_text_file(dir / "predicted.json", peakmap_to_json(predicted).dump(2) + "\n");
    write_text_file(dir / "patterns.json", pattern_report_to_json(report).dump(2) + "\n");

    if (compare) {
        TauPolynomial tau = build_tau(spec);
        FieldSlice slice(tau, cfg.t);
        GridWindow window = cfg.grid ? *cfg.grid : auto_window(spec, cfg.t.get_d());
        FieldGrid grid = grid_eval(slice, window);
        PeakMap detected = detect_peaks(grid, slice, cfg.detect);
        classify_groups(detected, cfg.classify);
        json cmp = comparison_json(detected, predicted);
        write_text_file(dir / "compare.json", cmp.dump(2) + "\n");
        write_text_file(dir / "peaks.json", peakmap_to_json(detected).dump(2) + "\n");
    }
    return kExitOk;
}

}  // namespace dlwe
