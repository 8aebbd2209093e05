#pragma once

#include <optional>

#include "hypgan/losses.hpp"
#include "hypgan/metrics.hpp"

namespace hypgan {

// Everything that determines a run. Every field is echoed verbatim into
// <out_dir>/run.meta so under-specified hyperparameters stay auditable.
struct ExperimentConfig {
    Variant variant = Variant::GAN;
    std::string arch = "D_eeee G_eeee";  // may carry cd=/cg=
    std::uint64_t seed = 1;
    int epochs = 100;
    std::int64_t batch_size = 64;
    int d_steps = 1;
    double lambda_gp = 10.0;
    std::optional<double> lr;  // default: GAN 0.001, CGAN/WGAN-GP 0.0001
    double beta1 = 0.5;
    double beta2 = 0.999;
    std::int64_t eval_samples = 10000;
    int eval_every = 5;
    std::int64_t subset = 0;  // 0 = full dataset
    std::string out_dir;      // empty = no files written
    std::string resume_from;

    double effective_lr() const;
};

struct MetricsRecord {
    int epoch = 0;
    Variant variant = Variant::GAN;
    std::string arch;  // tags only, e.g. "D_eeee G_eeee"
    std::optional<double> c_d;
    std::optional<double> c_g;
    std::uint64_t seed = 0;
    std::optional<double> loss_d;
    std::optional<double> loss_g;
    std::optional<double> fid;
    std::optional<double> is;
    std::string status = "ok";  // ok | diverged
};

// Fixed schema: epoch,variant,arch,c_d,c_g,seed,loss_d,loss_g,fid,is,status
std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRecord& r);

struct RunResult {
    std::vector<MetricsRecord> records;
    bool diverged = false;
    Network generator;
    Network discriminator;
};

// Trains one configuration. Divergence (any non-finite value) terminates the
// run with a final status=diverged record instead of throwing.
RunResult run_experiment(const ExperimentConfig& cfg, const Dataset& data,
                         const Evaluator& evaluator);

// Binary P5 grid of generated samples; [-1,1] maps to [0,255], tiles are laid
// out row-major with 2-pixel separators.
void emit_sample_grid(const Network& generator, Variant variant, RngState& rng, int grid_rows,
                      int grid_cols, const std::string& path);

struct SweepSpec {
    Variant variant = Variant::GAN;
    std::vector<std::string> archs;    // tag strings, optionally with cd=/cg=
    std::vector<double> c_values;      // applied per arch to its hyperbolic nets
    std::vector<std::uint64_t> seeds = {1};
    ExperimentConfig base;
    bool include_baseline = true;
    int workers = 1;
};

struct SweepCell {
    ExperimentConfig cfg;
    std::string arch_tags;
    std::optional<double> c_d;
    std::optional<double> c_g;
};

struct SweepCellResult {
    SweepCell cell;
    std::uint64_t seed = 0;
    std::optional<double> fid;
    std::optional<double> is;
    std::string status = "ok";  // ok | diverged | error
};

struct SweepSummary {
    std::vector<SweepCellResult> results;
    // One row per (arch, c_d, c_g): mean FID/IS over seeds plus the per-seed
    // values side by side.
    std::string table_csv;
};

std::vector<SweepCell> expand_sweep(const SweepSpec& spec);
SweepSummary run_sweep(const SweepSpec& spec, const Dataset& data, const Evaluator& evaluator);

// Checkpointing: load(save(state)) reproduces bit-identical parameters,
// optimizer state and rng streams, hence an identical training trajectory.
struct TrainState {
    ArchConfig arch;
    int epochs_completed = 0;
    Network generator;
    Network discriminator;
    AdamState adam_g;
    AdamState adam_d;
    RngState shuffle_rng;
    RngState noise_rng;
    RngState dropout_rng;
    RngState eps_rng;
};

void save_checkpoint(const std::string& path, const TrainState& state);
TrainState load_checkpoint(const std::string& path);

void save_evaluator(const std::string& path, const Evaluator& ev);
Evaluator load_evaluator(const std::string& path);

}  // namespace hypgan
