#include "hypgan/experiment.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace hypgan {

namespace {

// ---------------------------------------------------------------- binary io

void write_bytes(std::ostream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) {
        b[i] = static_cast<unsigned char>(v >> (8 * i));
    }
    write_bytes(out, b, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<unsigned char>(v >> (8 * i));
    }
    write_bytes(out, b, 8);
}

void write_i64(std::ostream& out, std::int64_t v) { write_u64(out, static_cast<std::uint64_t>(v)); }

void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    write_bytes(out, s.data(), s.size());
}

void read_bytes(std::istream& in, void* p, std::size_t n, const char* what) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw DataError(std::string("checkpoint truncated while reading ") + what);
    }
}

std::uint32_t read_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    read_bytes(in, b, 4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    }
    return v;
}

std::uint64_t read_u64(std::istream& in, const char* what) {
    unsigned char b[8];
    read_bytes(in, b, 8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    return v;
}

std::int64_t read_i64(std::istream& in, const char* what) {
    return static_cast<std::int64_t>(read_u64(in, what));
}

double read_f64(std::istream& in, const char* what) {
    return std::bit_cast<double>(read_u64(in, what));
}

std::string read_string(std::istream& in, const char* what) {
    const std::uint32_t n = read_u32(in, what);
    std::string s(n, '\0');
    read_bytes(in, s.data(), n, what);
    return s;
}

void write_tensor(std::ostream& out, const Tensor& t) {
    write_i64(out, t.rows());
    write_i64(out, t.cols());
    for (std::int64_t i = 0; i < t.numel(); ++i) {
        write_f64(out, t[i]);
    }
}

Tensor read_tensor(std::istream& in, const char* what) {
    const std::int64_t rows = read_i64(in, what);
    const std::int64_t cols = read_i64(in, what);
    if (rows < 0 || cols < 0 || rows * cols > (1LL << 32)) {
        throw DataError(std::string("checkpoint tensor shape corrupt in ") + what);
    }
    Tensor t(rows, cols);
    for (std::int64_t i = 0; i < t.numel(); ++i) {
        t[i] = read_f64(in, what);
    }
    return t;
}

void write_params(std::ostream& out, const std::vector<Parameter>& params) {
    write_u32(out, static_cast<std::uint32_t>(params.size()));
    for (const Parameter& p : params) {
        write_string(out, p.name);
        write_tensor(out, p.value);
    }
}

void read_params_into(std::istream& in, std::vector<Parameter>& params, const char* what) {
    const std::uint32_t n = read_u32(in, what);
    if (n != params.size()) {
        throw DataError(std::string("checkpoint parameter count mismatch in ") + what);
    }
    for (Parameter& p : params) {
        const std::string name = read_string(in, what);
        Tensor t = read_tensor(in, what);
        if (name != p.name || !t.same_shape(p.value)) {
            throw DataError(std::string("checkpoint parameter '") + name +
                            "' does not match network structure in " + what);
        }
        p.value = std::move(t);
    }
}

void write_adam(std::ostream& out, const AdamState& a) {
    write_i64(out, a.step);
    write_f64(out, a.cfg.lr);
    write_f64(out, a.cfg.beta1);
    write_f64(out, a.cfg.beta2);
    write_f64(out, a.cfg.eps);
    write_u32(out, static_cast<std::uint32_t>(a.m.size()));
    for (const Tensor& t : a.m) {
        write_tensor(out, t);
    }
    for (const Tensor& t : a.v) {
        write_tensor(out, t);
    }
}

AdamState read_adam(std::istream& in, const char* what) {
    AdamState a;
    a.step = read_i64(in, what);
    a.cfg.lr = read_f64(in, what);
    a.cfg.beta1 = read_f64(in, what);
    a.cfg.beta2 = read_f64(in, what);
    a.cfg.eps = read_f64(in, what);
    const std::uint32_t n = read_u32(in, what);
    a.m.reserve(n);
    a.v.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        a.m.push_back(read_tensor(in, what));
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        a.v.push_back(read_tensor(in, what));
    }
    return a;
}

void write_rng(std::ostream& out, const RngState& r) {
    write_u64(out, r.seed);
    write_u64(out, r.counter);
}

RngState read_rng(std::istream& in, const char* what) {
    RngState r;
    r.seed = read_u64(in, what);
    r.counter = read_u64(in, what);
    return r;
}

// ----------------------------------------------------------------- helpers

std::string format_opt(const std::optional<double>& v) {
    if (!v) {
        return "";
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", *v);
    return buf;
}

std::string arch_tags_only(const ArchConfig& a) { return "D_" + a.d_tags + " G_" + a.g_tags; }

Tensor sample_uniform_col(std::int64_t n, RngState& rng) {
    Tensor t(n, 1);
    for (std::int64_t i = 0; i < n; ++i) {
        t[i] = rng.next_uniform();
    }
    return t;
}

}  // namespace

double ExperimentConfig::effective_lr() const {
    if (lr) {
        return *lr;
    }
    return variant == Variant::GAN ? 0.001 : 0.0001;
}

std::string metrics_csv_header() {
    return "epoch,variant,arch,c_d,c_g,seed,loss_d,loss_g,fid,is,status";
}

std::string metrics_csv_row(const MetricsRecord& r) {
    std::ostringstream out;
    out << r.epoch << ',' << variant_name(r.variant) << ',' << r.arch << ',' << format_opt(r.c_d)
        << ',' << format_opt(r.c_g) << ',' << r.seed << ',' << format_opt(r.loss_d) << ','
        << format_opt(r.loss_g) << ',' << format_opt(r.fid) << ',' << format_opt(r.is) << ','
        << r.status;
    return out.str();
}

namespace {

// ------------------------------------------------------------ training loop

struct Trainer {
    const ExperimentConfig& cfg;
    const Dataset& data;
    const Evaluator& evaluator;
    ArchConfig arch;
    TrainState st;
    GaussianSummary real_summary;
    std::int64_t noise_dim = kNoiseDim;

    Trainer(const ExperimentConfig& c, const Dataset& d, const Evaluator& ev)
        : cfg(c), data(d), evaluator(ev) {
        arch = parse_config(cfg.arch);
        arch.variant = cfg.variant;
        if (!cfg.resume_from.empty()) {
            st = load_checkpoint(cfg.resume_from);
            if (st.arch != arch) {
                throw DataError("checkpoint architecture '" + render_config(st.arch) +
                                "' does not match requested '" + render_config(arch) + "'");
            }
        } else {
            st.arch = arch;
            RngState root(cfg.seed);
            RngState g_init = root.split(1);
            RngState d_init = root.split(2);
            st.generator = build_generator(arch, default_generator_widths(cfg.variant), g_init);
            st.discriminator =
                build_discriminator(arch, default_discriminator_widths(cfg.variant), d_init);
            const AdamConfig adam_cfg{cfg.effective_lr(), cfg.beta1, cfg.beta2, 1e-8};
            st.adam_g = make_adam_state(st.generator, adam_cfg);
            st.adam_d = make_adam_state(st.discriminator, adam_cfg);
            st.shuffle_rng = root.split(3);
            st.noise_rng = root.split(4);
            st.dropout_rng = root.split(5);
            st.eps_rng = root.split(6);
        }
    }

    bool conditional() const { return cfg.variant == Variant::CGAN; }

    ad::Var conditioned(ad::Graph& g, ad::Var x, ad::Var labels) const {
        return conditional() ? g.concat_cols(x, labels) : x;
    }

    // One discriminator update on a real batch; returns the loss value.
    double d_step(const Batch& batch) {
        ad::Graph g;
        BoundNet bound_d = bind(g, st.discriminator);
        BoundNet bound_g = bind(g, st.generator);
        const std::int64_t n = batch.images.rows();
        ad::Var labels = conditional() ? g.leaf(batch.labels_one_hot) : ad::Var{};
        ad::Var real = g.leaf(batch.images);
        ad::Var noise = g.leaf(sample_noise(n, noise_dim, st.noise_rng));
        ad::Var fake_out = bound_g.forward(conditioned(g, noise, labels), true, st.dropout_rng);
        // Detached: the discriminator step must not propagate into G.
        ad::Var fake = g.leaf(fake_out.value());

        ad::Var loss;
        if (cfg.variant == Variant::WGAN_GP) {
            auto critic = [&](ad::Var x) { return bound_d.forward(x, true, st.dropout_rng); };
            ad::Var eps = g.leaf(sample_uniform_col(n, st.eps_rng));
            loss = losses::wgan_gp_d_loss(critic, real, fake, eps, cfg.lambda_gp).total;
        } else {
            ad::Var d_real = bound_d.forward(conditioned(g, real, labels), true, st.dropout_rng);
            ad::Var d_fake = bound_d.forward(conditioned(g, fake, labels), true, st.dropout_rng);
            loss = losses::gan_d_loss(d_real, d_fake);
        }
        std::vector<Tensor> grads = g.backward(loss, bound_d.params);
        if (!adam_step(st.adam_d, st.discriminator.params, grads)) {
            throw ad::NonFiniteError("non-finite discriminator gradient");
        }
        return loss.value().item();
    }

    double g_step(const Batch& batch) {
        ad::Graph g;
        BoundNet bound_d = bind(g, st.discriminator);
        BoundNet bound_g = bind(g, st.generator);
        const std::int64_t n = batch.images.rows();
        ad::Var labels = conditional() ? g.leaf(batch.labels_one_hot) : ad::Var{};
        ad::Var noise = g.leaf(sample_noise(n, noise_dim, st.noise_rng));
        ad::Var fake = bound_g.forward(conditioned(g, noise, labels), true, st.dropout_rng);

        ad::Var loss;
        if (cfg.variant == Variant::WGAN_GP) {
            auto critic = [&](ad::Var x) { return bound_d.forward(x, true, st.dropout_rng); };
            loss = losses::wgan_g_loss(critic, fake);
        } else {
            ad::Var d_fake = bound_d.forward(conditioned(g, fake, labels), true, st.dropout_rng);
            loss = losses::gan_g_loss(d_fake);
        }
        std::vector<Tensor> grads = g.backward(loss, bound_g.params);
        if (!adam_step(st.adam_g, st.generator.params, grads)) {
            throw ad::NonFiniteError("non-finite generator gradient");
        }
        return loss.value().item();
    }

    Tensor generate_images(std::int64_t count, RngState& rng) const {
        Tensor out(count, kImageDim);
        RngState no_dropout(0);
        std::int64_t done = 0;
        while (done < count) {
            const std::int64_t chunk = std::min<std::int64_t>(256, count - done);
            ad::Graph g;
            BoundNet bound_g = bind(g, st.generator);
            ad::Var noise = g.leaf(sample_noise(chunk, noise_dim, rng));
            ad::Var input = noise;
            if (conditional()) {
                std::vector<int> labels(static_cast<std::size_t>(chunk));
                for (std::int64_t i = 0; i < chunk; ++i) {
                    labels[static_cast<std::size_t>(i)] = static_cast<int>((done + i) % 10);
                }
                input = g.concat_cols(noise, g.leaf(one_hot(labels)));
            }
            const Tensor& imgs = bound_g.forward(input, false, no_dropout).value();
            for (std::int64_t i = 0; i < imgs.numel(); ++i) {
                out[done * kImageDim + i] = imgs[i];
            }
            done += chunk;
        }
        return out;
    }

    MetricsRecord base_record(int epoch) const {
        MetricsRecord r;
        r.epoch = epoch;
        r.variant = cfg.variant;
        r.arch = arch_tags_only(arch);
        r.c_d = arch.c_d;
        r.c_g = arch.c_g;
        r.seed = cfg.seed;
        return r;
    }

    MetricsRecord evaluate(int epoch, std::optional<double> loss_d, std::optional<double> loss_g) {
        MetricsRecord r = base_record(epoch);
        r.loss_d = loss_d;
        r.loss_g = loss_g;
        RngState eval_rng = RngState(cfg.seed).split(0x1000 + static_cast<std::uint64_t>(epoch));
        const Tensor images = generate_images(cfg.eval_samples, eval_rng);
        const EvalOutput eo = evaluate_images(evaluator, images);
        r.fid = fid(real_summary, summarize_features(eo.features));
        r.is = inception_score_split(eo.probs, 10).mean;
        return r;
    }
};

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const Dataset& data,
                         const Evaluator& evaluator) {
    const Dataset ds = take_subset(data, cfg.subset);
    Trainer tr(cfg, ds, evaluator);
    tr.real_summary = summarize_features(evaluate_images(evaluator, ds.images).features);

    RunResult result;
    if (tr.st.epochs_completed == 0) {
        result.records.push_back(tr.evaluate(0, std::nullopt, std::nullopt));
    }

    for (int epoch = tr.st.epochs_completed + 1; epoch <= cfg.epochs; ++epoch) {
        double sum_d = 0.0;
        double sum_g = 0.0;
        std::int64_t steps = 0;
        try {
            for (const auto& idx : epoch_batches(ds.size(), cfg.batch_size, tr.st.shuffle_rng)) {
                const Batch batch = gather(ds, idx);
                double ld = 0.0;
                for (int k = 0; k < cfg.d_steps; ++k) {
                    ld = tr.d_step(batch);
                }
                const double lg = tr.g_step(batch);
                sum_d += ld;
                sum_g += lg;
                ++steps;
            }
        } catch (const ad::NonFiniteError&) {
            result.diverged = true;
        } catch (const BallError&) {
            result.diverged = true;
        }
        const std::optional<double> mean_d =
            steps > 0 ? std::optional<double>(sum_d / static_cast<double>(steps)) : std::nullopt;
        const std::optional<double> mean_g =
            steps > 0 ? std::optional<double>(sum_g / static_cast<double>(steps)) : std::nullopt;

        if (result.diverged) {
            MetricsRecord r = tr.base_record(epoch);
            r.loss_d = mean_d;
            r.loss_g = mean_g;
            r.status = "diverged";
            result.records.push_back(r);
            break;
        }
        tr.st.epochs_completed = epoch;
        if (epoch % cfg.eval_every == 0 || epoch == cfg.epochs) {
            result.records.push_back(tr.evaluate(epoch, mean_d, mean_g));
        }
    }

    if (!cfg.out_dir.empty()) {
        std::filesystem::create_directories(cfg.out_dir);
        {
            std::ofstream csv(cfg.out_dir + "/metrics.csv");
            csv << metrics_csv_header() << '\n';
            for (const MetricsRecord& r : result.records) {
                csv << metrics_csv_row(r) << '\n';
            }
        }
        {
            std::ofstream meta(cfg.out_dir + "/run.meta");
            meta << "variant = " << variant_name(cfg.variant) << '\n'
                 << "arch = " << render_config(tr.arch) << '\n'
                 << "seed = " << cfg.seed << '\n'
                 << "epochs = " << cfg.epochs << '\n'
                 << "batch_size = " << cfg.batch_size << '\n'
                 << "d_steps = " << cfg.d_steps << '\n'
                 << "lambda_gp = " << cfg.lambda_gp << '\n'
                 << "lr = " << cfg.effective_lr() << '\n'
                 << "beta1 = " << cfg.beta1 << '\n'
                 << "beta2 = " << cfg.beta2 << '\n'
                 << "adam_eps = " << 1e-8 << '\n'
                 << "eval_samples = " << cfg.eval_samples << '\n'
                 << "eval_every = " << cfg.eval_every << '\n'
                 << "subset = " << cfg.subset << '\n'
                 << "noise_dim = " << kNoiseDim << '\n'
                 << "dropout = " << kDropoutRate << '\n'
                 << "leaky_slope = " << kLeakySlope << '\n'
                 << "resume_from = " << cfg.resume_from << '\n'
                 << "status = " << (result.diverged ? "diverged" : "ok") << '\n';
        }
        if (!result.diverged) {
            RngState grid_rng = RngState(cfg.seed).split(0x9999);
            emit_sample_grid(tr.st.generator, cfg.variant, grid_rng, 8, 8,
                             cfg.out_dir + "/samples.pgm");
        }
        save_checkpoint(cfg.out_dir + "/checkpoint.bin", tr.st);
    }

    result.generator = std::move(tr.st.generator);
    result.discriminator = std::move(tr.st.discriminator);
    return result;
}

void emit_sample_grid(const Network& generator, Variant variant, RngState& rng, int grid_rows,
                      int grid_cols, const std::string& path) {
    const int count = grid_rows * grid_cols;
    ad::Graph g;
    BoundNet bound = bind(g, generator);
    RngState no_dropout(0);
    ad::Var noise = g.leaf(sample_noise(count, kNoiseDim, rng));
    ad::Var input = noise;
    if (variant == Variant::CGAN) {
        std::vector<int> labels(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            labels[static_cast<std::size_t>(i)] = i % 10;
        }
        input = g.concat_cols(noise, g.leaf(one_hot(labels)));
    }
    const Tensor& images = bound.forward(input, false, no_dropout).value();

    constexpr int kSide = 28;
    constexpr int kSep = 2;
    const int width = grid_cols * kSide + (grid_cols - 1) * kSep;
    const int height = grid_rows * kSide + (grid_rows - 1) * kSep;
    std::vector<unsigned char> canvas(static_cast<std::size_t>(width) * height, 0);
    for (int tile = 0; tile < count; ++tile) {
        const int tr_ = tile / grid_cols;
        const int tc = tile % grid_cols;
        const int y0 = tr_ * (kSide + kSep);
        const int x0 = tc * (kSide + kSep);
        for (int y = 0; y < kSide; ++y) {
            for (int x = 0; x < kSide; ++x) {
                const double v = images.at(tile, y * kSide + x);
                long p = std::lround((v + 1.0) * 127.5);
                p = p < 0 ? 0 : (p > 255 ? 255 : p);
                canvas[static_cast<std::size_t>(y0 + y) * width + (x0 + x)] =
                    static_cast<unsigned char>(p);
            }
        }
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write sample grid '" + path + "'");
    }
    out << "P5\n" << width << ' ' << height << "\n255\n";
    out.write(reinterpret_cast<const char*>(canvas.data()),
              static_cast<std::streamsize>(canvas.size()));
}

// -------------------------------------------------------------------- sweep

std::vector<SweepCell> expand_sweep(const SweepSpec& spec) {
    std::vector<std::string> archs = spec.archs;
    if (spec.include_baseline) {
        bool have_baseline = false;
        for (const std::string& a : archs) {
            if (a.find('h') == std::string::npos) {
                have_baseline = true;
            }
        }
        if (!have_baseline) {
            archs.insert(archs.begin(), "D_eeee G_eeee");
        }
    }

    std::vector<SweepCell> cells;
    for (const std::string& arch : archs) {
        std::vector<std::string> variants_of_arch;
        if (arch.find('=') != std::string::npos || arch.find('h') == std::string::npos) {
            variants_of_arch.push_back(arch);
        } else {
            // Tags only: instantiate one cell per sweep curvature, assigning c
            // to whichever networks are hyperbolic.
            std::istringstream in(arch);
            std::string d_tok, g_tok;
            in >> d_tok >> g_tok;
            const bool d_hyp = d_tok.find('h') != std::string::npos;
            const bool g_hyp = g_tok.find('h') != std::string::npos;
            if (spec.c_values.empty()) {
                throw std::invalid_argument("sweep arch '" + arch +
                                            "' is hyperbolic but no c values were given");
            }
            for (double c : spec.c_values) {
                char buf[40];
                std::snprintf(buf, sizeof(buf), "%.9g", c);
                std::string s = d_tok + " " + g_tok;
                if (d_hyp) {
                    s += std::string(" cd=") + buf;
                }
                if (g_hyp) {
                    s += std::string(" cg=") + buf;
                }
                variants_of_arch.push_back(s);
            }
        }
        for (const std::string& arch_str : variants_of_arch) {
            ArchConfig parsed = parse_config(arch_str);
            parsed.variant = spec.variant;
            for (std::uint64_t seed : spec.seeds) {
                SweepCell cell;
                cell.cfg = spec.base;
                cell.cfg.variant = spec.variant;
                cell.cfg.arch = arch_str;
                cell.cfg.seed = seed;
                cell.arch_tags = arch_tags_only(parsed);
                cell.c_d = parsed.c_d;
                cell.c_g = parsed.c_g;
                if (!spec.base.out_dir.empty()) {
                    std::string dir = cell.arch_tags;
                    for (char& ch : dir) {
                        if (ch == ' ') {
                            ch = '_';
                        }
                    }
                    if (cell.c_d) {
                        dir += "_cd" + format_opt(cell.c_d);
                    }
                    if (cell.c_g) {
                        dir += "_cg" + format_opt(cell.c_g);
                    }
                    dir += "_s" + std::to_string(seed);
                    cell.cfg.out_dir = spec.base.out_dir + "/" + dir;
                }
                cells.push_back(std::move(cell));
            }
        }
    }
    return cells;
}

SweepSummary run_sweep(const SweepSpec& spec, const Dataset& data, const Evaluator& evaluator) {
    const std::vector<SweepCell> cells = expand_sweep(spec);
    std::vector<SweepCellResult> results(cells.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) {
                return;
            }
            SweepCellResult res;
            res.cell = cells[i];
            res.seed = cells[i].cfg.seed;
            try {
                const RunResult run = run_experiment(cells[i].cfg, data, evaluator);
                res.status = run.diverged ? "diverged" : "ok";
                for (auto it = run.records.rbegin(); it != run.records.rend(); ++it) {
                    if (it->fid) {
                        res.fid = it->fid;
                        res.is = it->is;
                        break;
                    }
                }
            } catch (const std::exception& e) {
                res.status = std::string("error: ") + e.what();
            }
            results[i] = std::move(res);
        }
    };

    const int workers = std::max(1, spec.workers);
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int i = 0; i < workers; ++i) {
            pool.emplace_back(worker);
        }
        for (std::thread& t : pool) {
            t.join();
        }
    }

    // Aggregate per (arch, c_d, c_g), preserving first-seen order.
    std::ostringstream table;
    table << "variant,arch,c_d,c_g,seeds,fid_mean,fid_per_seed,is_mean,is_per_seed,statuses\n";
    std::vector<std::string> seen;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const SweepCellResult& r = results[i];
        const std::string key =
            r.cell.arch_tags + "|" + format_opt(r.cell.c_d) + "|" + format_opt(r.cell.c_g);
        bool first = true;
        for (const std::string& s : seen) {
            if (s == key) {
                first = false;
            }
        }
        if (!first) {
            continue;
        }
        seen.push_back(key);

        std::vector<const SweepCellResult*> group;
        for (const SweepCellResult& o : results) {
            if (o.cell.arch_tags == r.cell.arch_tags && o.cell.c_d == r.cell.c_d &&
                o.cell.c_g == r.cell.c_g) {
                group.push_back(&o);
            }
        }
        double fid_sum = 0.0;
        double is_sum = 0.0;
        int fid_n = 0;
        std::string fid_list;
        std::string is_list;
        std::string seed_list;
        std::string status_list;
        for (const SweepCellResult* o : group) {
            if (!seed_list.empty()) {
                seed_list += ';';
                fid_list += ';';
                is_list += ';';
                status_list += ';';
            }
            seed_list += std::to_string(o->seed);
            fid_list += format_opt(o->fid);
            is_list += format_opt(o->is);
            status_list += o->status;
            if (o->fid) {
                fid_sum += *o->fid;
                is_sum += o->is ? *o->is : 0.0;
                ++fid_n;
            }
        }
        table << variant_name(spec.variant) << ',' << r.cell.arch_tags << ','
              << format_opt(r.cell.c_d) << ',' << format_opt(r.cell.c_g) << ',' << seed_list << ','
              << (fid_n > 0 ? format_opt(fid_sum / fid_n) : std::string()) << ',' << fid_list << ','
              << (fid_n > 0 ? format_opt(is_sum / fid_n) : std::string()) << ',' << is_list << ','
              << status_list << '\n';
    }

    SweepSummary summary;
    summary.results = std::move(results);
    summary.table_csv = table.str();

    if (!spec.base.out_dir.empty()) {
        std::filesystem::create_directories(spec.base.out_dir);
        std::ofstream per_cell(spec.base.out_dir + "/sweep_results.csv");
        per_cell << "variant,arch,c_d,c_g,seed,fid,is,status\n";
        for (const SweepCellResult& r : summary.results) {
            per_cell << variant_name(spec.variant) << ',' << r.cell.arch_tags << ','
                     << format_opt(r.cell.c_d) << ',' << format_opt(r.cell.c_g) << ',' << r.seed
                     << ',' << format_opt(r.fid) << ',' << format_opt(r.is) << ',' << r.status
                     << '\n';
        }
        std::ofstream tbl(spec.base.out_dir + "/sweep_summary.csv");
        tbl << summary.table_csv;
    }
    return summary;
}

// -------------------------------------------------------------- checkpoints

namespace {
constexpr char kCheckpointMagic[4] = {'H', 'G', 'C', 'K'};
constexpr char kEvaluatorMagic[4] = {'H', 'G', 'E', 'V'};
constexpr std::uint32_t kFormatVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, const TrainState& state) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write checkpoint '" + path + "'");
    }
    write_bytes(out, kCheckpointMagic, 4);
    write_u32(out, kFormatVersion);
    write_string(out, render_config(state.arch));
    write_u32(out, static_cast<std::uint32_t>(state.arch.variant));
    write_i64(out, state.epochs_completed);
    write_rng(out, state.shuffle_rng);
    write_rng(out, state.noise_rng);
    write_rng(out, state.dropout_rng);
    write_rng(out, state.eps_rng);
    write_params(out, state.generator.params);
    write_params(out, state.discriminator.params);
    write_adam(out, state.adam_g);
    write_adam(out, state.adam_d);
}

TrainState load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open checkpoint '" + path + "'");
    }
    char magic[4];
    read_bytes(in, magic, 4, "magic");
    if (std::string(magic, 4) != std::string(kCheckpointMagic, 4)) {
        throw DataError("'" + path + "' is not a checkpoint file");
    }
    if (read_u32(in, "version") != kFormatVersion) {
        throw DataError("unsupported checkpoint version in '" + path + "'");
    }
    TrainState st;
    st.arch = parse_config(read_string(in, "arch"));
    st.arch.variant = static_cast<Variant>(read_u32(in, "variant"));
    st.epochs_completed = static_cast<int>(read_i64(in, "epoch"));
    st.shuffle_rng = read_rng(in, "rng");
    st.noise_rng = read_rng(in, "rng");
    st.dropout_rng = read_rng(in, "rng");
    st.eps_rng = read_rng(in, "rng");

    RngState scratch(0);
    st.generator = build_generator(st.arch, default_generator_widths(st.arch.variant), scratch);
    st.discriminator =
        build_discriminator(st.arch, default_discriminator_widths(st.arch.variant), scratch);
    read_params_into(in, st.generator.params, "generator");
    read_params_into(in, st.discriminator.params, "discriminator");
    st.adam_g = read_adam(in, "adam_g");
    st.adam_d = read_adam(in, "adam_d");
    return st;
}

void save_evaluator(const std::string& path, const Evaluator& ev) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot write evaluator '" + path + "'");
    }
    write_bytes(out, kEvaluatorMagic, 4);
    write_u32(out, kFormatVersion);
    write_u64(out, ev.seed);
    write_f64(out, ev.test_accuracy);
    write_params(out, ev.net.params);
}

Evaluator load_evaluator(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open evaluator '" + path + "'");
    }
    char magic[4];
    read_bytes(in, magic, 4, "magic");
    if (std::string(magic, 4) != std::string(kEvaluatorMagic, 4)) {
        throw DataError("'" + path + "' is not an evaluator checkpoint");
    }
    if (read_u32(in, "version") != kFormatVersion) {
        throw DataError("unsupported evaluator version in '" + path + "'");
    }
    Evaluator ev;
    ev.seed = read_u64(in, "seed");
    ev.test_accuracy = read_f64(in, "accuracy");
    RngState scratch(0);
    ev.net = build_evaluator_classifier(scratch);
    read_params_into(in, ev.net.params, "evaluator");
    return ev;
}

}  // namespace hypgan
