#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "dlwe/cli.hpp"

namespace {

void emit_error(int code, const std::string &message) {
    nlohmann::json err{{"error", {{"code", code}, {"message", message}}}};
    std::cerr << err.dump() << "\n";
}

struct CommonOpts {
    std::string config_path;
    std::string partition;
    std::string b, omega, t;
    std::string grid;
    std::string out;
};

void add_common(CLI::App *cmd, CommonOpts &opts) {
    cmd->add_option("--config", opts.config_path, "JSON config file; flags override its keys");
    cmd->add_option("--partition", opts.partition, "partition parts, e.g. 1,1");
    cmd->add_option("--b", opts.b, "parameter b as a rational, e.g. 1/2 or 0.5");
    cmd->add_option("--omega", opts.omega, "parameter omega as a rational");
    cmd->add_option("--t", opts.t, "time slice");
    cmd->add_option("--grid", opts.grid, "window rmin,rmax,smin,smax,nr,ns (default: auto)");
    cmd->add_option("--out", opts.out, "output directory");
}

dlwe::RunConfig resolve(const CommonOpts &opts, CLI::App *cmd) {
    dlwe::RunConfig cfg;
    if (!opts.config_path.empty()) dlwe::load_config_file(cfg, opts.config_path);
    if (!opts.partition.empty()) cfg.partition = dlwe::parse_partition_list(opts.partition);
    if (!opts.b.empty()) cfg.b = dlwe::parse_rational(opts.b);
    if (!opts.omega.empty()) cfg.omega = dlwe::parse_rational(opts.omega);
    if (!opts.t.empty()) cfg.t = dlwe::parse_rational(opts.t);
    if (!opts.grid.empty()) cfg.grid = dlwe::parse_grid_spec(opts.grid);
    if (!opts.out.empty()) cfg.out_dir = opts.out;

    // dotted-path numeric overrides, mirroring the JSON keys
    auto maybe = [&](const std::string &name, double &target) {
        if (cmd->count(name)) target = cmd->get_option(name)->as<double>();
    };
    maybe("--detect.threshold_rel", cfg.detect.threshold_rel);
    maybe("--detect.dedup_cells", cfg.detect.dedup_cells);
    maybe("--classify.band_coeff", cfg.classify.band_coeff);
    maybe("--classify.link_coeff", cfg.classify.link_coeff);
    maybe("--predict.core_coeff", cfg.predict.core_coeff);
    maybe("--predict.dedup_frac", cfg.predict.dedup_frac);
    maybe("--pattern.mirror_tol_frac", cfg.pattern.mirror_tol_frac);
    maybe("--pattern.lattice_rms_frac", cfg.pattern.lattice_rms_frac);
    if (cmd->count("--predict.seeds_per_axis_factor"))
        cfg.predict.seeds_per_axis_factor = cmd->get_option("--predict.seeds_per_axis_factor")->as<long>();
    return cfg;
}

void add_tuning(CLI::App *cmd) {
    cmd->add_option("--detect.threshold_rel", "relative |v| detection threshold");
    cmd->add_option("--detect.dedup_cells", "peak dedup radius in grid cells");
    cmd->add_option("--classify.band_coeff", "axis band half-width / sqrt|t|");
    cmd->add_option("--classify.link_coeff", "chain linking distance * n / sqrt|t|");
    cmd->add_option("--predict.core_coeff", "core seed box half-width / sqrt(|t|+1)");
    cmd->add_option("--predict.dedup_frac", "root merge radius as window fraction");
    cmd->add_option("--predict.seeds_per_axis_factor", "seed lattice: (factor*M)^2 points");
    cmd->add_option("--pattern.mirror_tol_frac", "mirror-check tolerance / diameter");
    cmd->add_option("--pattern.lattice_rms_frac", "lattice-fit RMS tolerance / spacing");
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"multi-lump solutions of the dispersive long wave system from integer partitions"};
    app.require_subcommand(1);

    CommonOpts info_opts, field_opts, peaks_opts, predict_opts;
    bool info_as_json = false, predict_compare = false;

    CLI::App *info = app.add_subcommand("info", "partition report: degree vector, M, classification, diagram");
    add_common(info, info_opts);
    info->add_flag("--json", info_as_json, "emit JSON instead of text");

    CLI::App *field = app.add_subcommand("field", "evaluate the field on a grid; writes field.csv + field_meta.json");
    add_common(field, field_opts);
    add_tuning(field);

    CLI::App *peaks = app.add_subcommand("peaks", "detect and classify peaks; writes peaks.json");
    add_common(peaks, peaks_opts);
    add_tuning(peaks);

    CLI::App *predict = app.add_subcommand("predict", "predict peak positions from the leading condition");
    add_common(predict, predict_opts);
    add_tuning(predict);
    predict->add_flag("--compare", predict_compare, "also detect peaks and write the matching table");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) return 0;  // --help
        emit_error(dlwe::kExitConfigError, e.what());
        return dlwe::kExitConfigError;
    }

    try {
        if (info->parsed()) return dlwe::cmd_info(resolve(info_opts, info), std::cout, info_as_json);
        if (field->parsed()) return dlwe::cmd_field(resolve(field_opts, field));
        if (peaks->parsed()) return dlwe::cmd_peaks(resolve(peaks_opts, peaks));
        if (predict->parsed()) return dlwe::cmd_predict(resolve(predict_opts, predict), predict_compare);
    } catch (const dlwe::ConfigError &e) {
        emit_error(dlwe::kExitConfigError, e.what());
        return dlwe::kExitConfigError;
    } catch (const dlwe::InvalidPartition &e) {
        emit_error(dlwe::kExitConfigError, e.what());
        return dlwe::kExitConfigError;
    } catch (const dlwe::ParameterError &e) {
        emit_error(dlwe::kExitConfigError, e.what());
        return dlwe::kExitConfigError;
    } catch (const std::exception &e) {
        emit_error(dlwe::kExitComputeError, e.what());
        return dlwe::kExitComputeError;
    }
    return 0;
}
