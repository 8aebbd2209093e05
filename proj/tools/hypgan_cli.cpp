#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "hypgan/experiment.hpp"

namespace {

using namespace hypgan;

std::string resolve_idx(const std::string& path) {
    namespace fs = std::filesystem;
    if (fs::exists(path)) {
        return path;
    }
    if (fs::exists(path + ".gz")) {
        return path + ".gz";
    }
    return path;  // let the loader report the miss
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            if (!cur.empty()) {
                out.push_back(cur);
            }
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) {
        out.push_back(cur);
    }
    return out;
}

struct DataArgs {
    std::string images;
    std::string labels;

    Dataset load() const { return load_mnist_idx(resolve_idx(images), resolve_idx(labels)); }
};

void add_data_options(CLI::App* cmd, DataArgs& a) {
    cmd->add_option("--images", a.images, "IDX image file (optionally .gz)")->required();
    cmd->add_option("--labels", a.labels, "IDX label file (optionally .gz)")->required();
}

struct RunArgs {
    DataArgs data;
    std::string evaluator_path;
    ExperimentConfig cfg;
    std::string variant = "gan";
    double cd = 0.0;
    double cg = 0.0;
    bool has_cd = false;
    bool has_cg = false;
    double lr = 0.0;
    bool has_lr = false;
};

void add_run_options(CLI::App* cmd, RunArgs& a) {
    add_data_options(cmd, a.data);
    cmd->add_option("--evaluator", a.evaluator_path, "trained evaluator checkpoint")->required();
    cmd->add_option("--variant", a.variant, "gan | cgan | wgan-gp")->capture_default_str();
    cmd->add_option("--arch", a.cfg.arch, "architecture, e.g. \"D_ehhh G_eehe cd=1e-5 cg=1e-3\"")
        ->capture_default_str();
    cmd->add_option("--cd", a.cd, "discriminator curvature (appended to --arch)")
        ->each([&a](const std::string&) { a.has_cd = true; });
    cmd->add_option("--cg", a.cg, "generator curvature (appended to --arch)")
        ->each([&a](const std::string&) { a.has_cg = true; });
    cmd->add_option("--seed", a.cfg.seed)->capture_default_str();
    cmd->add_option("--epochs", a.cfg.epochs)->capture_default_str();
    cmd->add_option("--batch-size", a.cfg.batch_size)->capture_default_str();
    cmd->add_option("--d-steps", a.cfg.d_steps, "discriminator updates per generator update")
        ->capture_default_str();
    cmd->add_option("--lambda-gp", a.cfg.lambda_gp)->capture_default_str();
    cmd->add_option("--lr", a.lr, "learning rate (default 0.001 GAN, 0.0001 CGAN/WGAN-GP)")
        ->each([&a](const std::string&) { a.has_lr = true; });
    cmd->add_option("--beta1", a.cfg.beta1)->capture_default_str();
    cmd->add_option("--beta2", a.cfg.beta2)->capture_default_str();
    cmd->add_option("--eval-samples", a.cfg.eval_samples)->capture_default_str();
    cmd->add_option("--eval-every", a.cfg.eval_every)->capture_default_str();
    cmd->add_option("--subset", a.cfg.subset, "use only the first N images (0 = all)")
        ->capture_default_str();
    cmd->add_option("--out-dir", a.cfg.out_dir, "output directory (csv, pgm, checkpoint, meta)");
    cmd->add_option("--resume", a.cfg.resume_from, "checkpoint to resume from");
    cmd->set_config("--config", "", "config file with key = value lines");
}

ExperimentConfig finalize_run_config(RunArgs& a) {
    a.cfg.variant = parse_variant(a.variant);
    if (a.has_lr) {
        a.cfg.lr = a.lr;
    }
    char buf[48];
    if (a.has_cd) {
        std::snprintf(buf, sizeof(buf), " cd=%.17g", a.cd);
        a.cfg.arch += buf;
    }
    if (a.has_cg) {
        std::snprintf(buf, sizeof(buf), " cg=%.17g", a.cg);
        a.cfg.arch += buf;
    }
    return a.cfg;
}

int cmd_train_evaluator(const DataArgs& train_files, const DataArgs& test_files,
                        std::uint64_t seed, int epochs, double min_accuracy,
                        const std::string& out_path) {
    const Dataset train = train_files.load();
    const Dataset test = test_files.load();
    EvaluatorOptions opts;
    opts.epochs = epochs;
    opts.min_accuracy = min_accuracy;
    const Evaluator ev = train_evaluator(train, test, seed, opts);
    save_evaluator(out_path, ev);
    std::cout << "evaluator test accuracy " << ev.test_accuracy << ", saved to " << out_path
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hyperbolic GAN experiments on the Poincare ball"};
    app.require_subcommand(1);

    // train-evaluator
    auto* cmd_eval = app.add_subcommand("train-evaluator", "train and save the metric classifier");
    DataArgs eval_train, eval_test;
    std::string eval_out = "evaluator.bin";
    std::uint64_t eval_seed = 1;
    int eval_epochs = 6;
    double eval_min_acc = 0.96;
    add_data_options(cmd_eval, eval_train);
    cmd_eval->add_option("--test-images", eval_test.images)->required();
    cmd_eval->add_option("--test-labels", eval_test.labels)->required();
    cmd_eval->add_option("--seed", eval_seed)->capture_default_str();
    cmd_eval->add_option("--epochs", eval_epochs)->capture_default_str();
    cmd_eval->add_option("--min-accuracy", eval_min_acc)->capture_default_str();
    cmd_eval->add_option("--out", eval_out)->capture_default_str();
    cmd_eval->set_config("--config");

    // run
    auto* cmd_run = app.add_subcommand("run", "train one configuration");
    RunArgs run_args;
    add_run_options(cmd_run, run_args);

    // sweep
    auto* cmd_sweep = app.add_subcommand("sweep", "grid over archs x c x seeds");
    RunArgs sweep_base;
    std::string sweep_archs = "D_eeee G_eeee";
    std::string sweep_cs;
    std::string sweep_seeds = "1";
    int sweep_workers = 1;
    bool no_baseline = false;
    add_run_options(cmd_sweep, sweep_base);
    cmd_sweep->add_option("--archs", sweep_archs, "';'-separated architectures")
        ->capture_default_str();
    cmd_sweep->add_option("--c-values", sweep_cs, "','-separated curvatures applied per arch");
    cmd_sweep->add_option("--seeds", sweep_seeds, "','-separated seeds")->capture_default_str();
    cmd_sweep->add_option("--workers", sweep_workers, "parallel cells")->capture_default_str();
    cmd_sweep->add_flag("--no-baseline", no_baseline, "do not add the all-euclidean row");

    // sample
    auto* cmd_sample = app.add_subcommand("sample", "write a PGM grid from a checkpoint");
    std::string sample_ckpt, sample_out = "samples.pgm";
    int sample_rows = 8, sample_cols = 8;
    std::uint64_t sample_seed = 1;
    cmd_sample->add_option("--checkpoint", sample_ckpt)->required();
    cmd_sample->add_option("--out", sample_out)->capture_default_str();
    cmd_sample->add_option("--rows", sample_rows)->capture_default_str();
    cmd_sample->add_option("--cols", sample_cols)->capture_default_str();
    cmd_sample->add_option("--seed", sample_seed)->capture_default_str();

    // radius-hist
    auto* cmd_hist = app.add_subcommand("radius-hist", "R(x) = tanh(sqrt(c)||x||) distribution");
    DataArgs hist_data;
    double hist_c = 1e-3;
    std::string hist_out;
    add_data_options(cmd_hist, hist_data);
    cmd_hist->add_option("-c,--curvature", hist_c)->capture_default_str();
    cmd_hist->add_option("--out", hist_out, "write histogram CSV here (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_eval->parsed()) {
            return cmd_train_evaluator(eval_train, eval_test, eval_seed, eval_epochs, eval_min_acc,
                                       eval_out);
        }
        if (cmd_run->parsed()) {
            const ExperimentConfig cfg = finalize_run_config(run_args);
            const Dataset data = run_args.data.load();
            const Evaluator ev = load_evaluator(run_args.evaluator_path);
            const RunResult result = run_experiment(cfg, data, ev);
            std::cout << metrics_csv_header() << "\n";
            for (const MetricsRecord& r : result.records) {
                std::cout << metrics_csv_row(r) << "\n";
            }
            // A cleanly diverged run is a completed run.
            return 0;
        }
        if (cmd_sweep->parsed()) {
            SweepSpec spec;
            spec.base = finalize_run_config(sweep_base);
            spec.variant = spec.base.variant;
            spec.archs = split_list(sweep_archs, ';');
            for (const std::string& c : split_list(sweep_cs, ',')) {
                spec.c_values.push_back(std::stod(c));
            }
            spec.seeds.clear();
            for (const std::string& s : split_list(sweep_seeds, ',')) {
                spec.seeds.push_back(std::stoull(s));
            }
            spec.include_baseline = !no_baseline;
            spec.workers = sweep_workers;
            const Dataset data = sweep_base.data.load();
            const Evaluator ev = load_evaluator(sweep_base.evaluator_path);
            const SweepSummary summary = run_sweep(spec, data, ev);
            std::cout << summary.table_csv;
            for (const SweepCellResult& r : summary.results) {
                if (r.status.rfind("error", 0) == 0) {
                    std::cerr << "cell " << r.cell.cfg.arch << " seed " << r.seed << ": "
                              << r.status << "\n";
                    return 1;
                }
            }
            return 0;
        }
        if (cmd_sample->parsed()) {
            const TrainState st = load_checkpoint(sample_ckpt);
            RngState rng = RngState(sample_seed).split(0x9999);
            emit_sample_grid(st.generator, st.arch.variant, rng, sample_rows, sample_cols,
                             sample_out);
            std::cout << "wrote " << sample_out << "\n";
            return 0;
        }
        if (cmd_hist->parsed()) {
            const Dataset data = hist_data.load();
            const RadiusHistogram h = radius_distribution(data.images, Curvature(hist_c));
            std::ostringstream out;
            out << "bin_lo,bin_hi,count\n";
            for (std::size_t i = 0; i < h.bins.size(); ++i) {
                out << (0.01 * static_cast<double>(i)) << ','
                    << (0.01 * static_cast<double>(i + 1)) << ',' << h.bins[i] << '\n';
            }
            out << "# min=" << h.min << " q25=" << h.q25 << " median=" << h.median
                << " q75=" << h.q75 << " max=" << h.max << " n=" << h.count << '\n';
            if (hist_out.empty()) {
                std::cout << out.str();
            } else {
                std::ofstream f(hist_out);
                f << out.str();
                std::cout << "wrote " << hist_out << "\n";
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
