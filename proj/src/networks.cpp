#include "hypgan/networks.hpp"

#include <charconv>
#include <sstream>

namespace hypgan {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::GAN: return "gan";
        case Variant::CGAN: return "cgan";
        case Variant::WGAN_GP: return "wgan-gp";
    }
    return "?";
}

Variant parse_variant(const std::string& name) {
    if (name == "gan") return Variant::GAN;
    if (name == "cgan") return Variant::CGAN;
    if (name == "wgan-gp" || name == "wgan_gp" || name == "wgan") return Variant::WGAN_GP;
    throw std::invalid_argument("unknown variant '" + name + "' (gan|cgan|wgan-gp)");
}

namespace {

std::vector<std::string> split_ws(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> tokens;
    std::string tok;
    while (in >> tok) {
        tokens.push_back(tok);
    }
    return tokens;
}

std::string parse_tags(const std::string& token, char which) {
    const std::string prefix = std::string(1, which) + "_";
    if (token.size() != 6 || token.compare(0, 2, prefix) != 0) {
        throw std::invalid_argument("malformed architecture token '" + token + "', expected " +
                                    prefix + "[eh]{4}");
    }
    const std::string tags = token.substr(2);
    for (char c : tags) {
        if (c != 'e' && c != 'h') {
            throw std::invalid_argument("bad layer tag '" + std::string(1, c) + "' in '" + token +
                                        "'");
        }
    }
    return tags;
}

double parse_double(const std::string& text, const std::string& where) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("bad number '" + text + "' in " + where);
    }
    return v;
}

// Shortest representation that round-trips through parse_double.
std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

ArchConfig parse_config(const std::string& text) {
    const std::vector<std::string> tokens = split_ws(text);
    if (tokens.size() < 2) {
        throw std::invalid_argument("architecture string needs 'D_xxxx G_xxxx', got '" + text +
                                    "'");
    }
    ArchConfig cfg;
    cfg.d_tags = parse_tags(tokens[0], 'D');
    cfg.g_tags = parse_tags(tokens[1], 'G');
    for (std::size_t i = 2; i < tokens.size(); ++i) {
        const std::string& tok = tokens[i];
        if (tok.rfind("cd=", 0) == 0) {
            cfg.c_d = parse_double(tok.substr(3), "cd");
        } else if (tok.rfind("cg=", 0) == 0) {
            cfg.c_g = parse_double(tok.substr(3), "cg");
        } else {
            throw std::invalid_argument("unexpected token '" + tok + "' in architecture string");
        }
    }
    if (cfg.d_hyperbolic() && !cfg.c_d) {
        throw std::invalid_argument("hyperbolic discriminator needs cd=<curvature>");
    }
    if (cfg.g_hyperbolic() && !cfg.c_g) {
        throw std::invalid_argument("hyperbolic generator needs cg=<curvature>");
    }
    if (!cfg.d_hyperbolic() && cfg.c_d) {
        throw std::invalid_argument("cd given but the discriminator has no hyperbolic layer");
    }
    if (!cfg.g_hyperbolic() && cfg.c_g) {
        throw std::invalid_argument("cg given but the generator has no hyperbolic layer");
    }
    if (cfg.c_d && !(*cfg.c_d > 0.0)) {
        throw std::invalid_argument("cd must be positive");
    }
    if (cfg.c_g && !(*cfg.c_g > 0.0)) {
        throw std::invalid_argument("cg must be positive");
    }
    return cfg;
}

std::string render_config(const ArchConfig& cfg) {
    std::string out = "D_" + cfg.d_tags + " G_" + cfg.g_tags;
    if (cfg.c_d) {
        out += " cd=" + format_double(*cfg.c_d);
    }
    if (cfg.c_g) {
        out += " cg=" + format_double(*cfg.c_g);
    }
    return out;
}

std::vector<std::int64_t> default_generator_widths(Variant v) {
    const std::int64_t in = v == Variant::CGAN ? kNoiseDim + kLabelDim : kNoiseDim;
    return {in, 256, 512, 1024, kImageDim};
}

std::vector<std::int64_t> default_discriminator_widths(Variant v) {
    const std::int64_t in = v == Variant::CGAN ? kImageDim + kLabelDim : kImageDim;
    return {in, 1024, 512, 256, 1};
}

namespace {

struct BuildSpec {
    const std::string& tags;
    const std::vector<std::int64_t>& widths;
    std::optional<Curvature> curvature;
    bool is_discriminator;
};

Network build_network(const BuildSpec& spec, RngState& rng) {
    const std::string& tags = spec.tags;
    const std::vector<std::int64_t>& widths = spec.widths;
    if (widths.size() != tags.size() + 1) {
        throw std::invalid_argument("widths must list input plus one size per layer");
    }
    Network net;
    net.curvature = spec.curvature;
    net.input_width = widths.front();
    net.output_width = widths.back();

    auto add_linear = [&](std::size_t i, bool hyperbolic) {
        const std::int64_t in = widths[i];
        const std::int64_t out = widths[i + 1];
        const int w_idx = static_cast<int>(net.params.size());
        net.params.push_back({"lin" + std::to_string(i) + ".weight",
                              layers::init_linear_weight(rng, out, in)});
        const int b_idx = static_cast<int>(net.params.size());
        net.params.push_back({"lin" + std::to_string(i) + ".bias", Tensor::zeros(1, out)});
        if (hyperbolic) {
            net.layers.push_back(HyperbolicLinear{w_idx, b_idx});
        } else {
            net.layers.push_back(EuclideanLinear{w_idx, b_idx});
        }
    };

    const std::size_t last = tags.size() - 1;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        const bool h = tags[i] == 'h';
        if (h && (i == 0 || tags[i - 1] == 'e')) {
            net.layers.push_back(ExpMapBoundary{});
        }
        add_linear(i, h);
        if (i < last) {
            if (h) {
                net.layers.push_back(HyperbolicLeakyReLU{kLeakySlope});
            } else {
                net.layers.push_back(LeakyReLULayer{kLeakySlope});
                if (spec.is_discriminator) {
                    net.layers.push_back(DropoutLayer{kDropoutRate});
                }
            }
            if (h && tags[i + 1] == 'e') {
                net.layers.push_back(LogMapBoundary{});
            }
        } else {
            // Output layer. The generator always returns to euclidean space and
            // ends in Tanh; a discriminator whose final tag is 'h' emits the raw
            // 1-d ball coordinate (|logit| < r) with no log map, which is the
            // stable choice for one dimension.
            if (!spec.is_discriminator) {
                if (h) {
                    net.layers.push_back(LogMapBoundary{});
                }
                net.layers.push_back(TanhLayer{});
            }
        }
    }
    validate_network(net, spec.is_discriminator);
    return net;
}

}  // namespace

Network build_generator(const ArchConfig& cfg, const std::vector<std::int64_t>& widths,
                        RngState& init_rng) {
    const std::int64_t want_in = cfg.variant == Variant::CGAN ? kNoiseDim + kLabelDim : kNoiseDim;
    if (widths.empty() || widths.front() != want_in) {
        throw std::invalid_argument("generator input width must be " + std::to_string(want_in) +
                                    " for variant " + variant_name(cfg.variant));
    }
    std::optional<Curvature> curv;
    if (cfg.g_hyperbolic()) {
        curv = Curvature(*cfg.c_g);
    }
    return build_network({cfg.g_tags, widths, curv, false}, init_rng);
}

Network build_discriminator(const ArchConfig& cfg, const std::vector<std::int64_t>& widths,
                            RngState& init_rng) {
    const std::int64_t want_in = cfg.variant == Variant::CGAN ? kImageDim + kLabelDim : kImageDim;
    if (widths.empty() || widths.front() != want_in) {
        throw std::invalid_argument("discriminator input width must be " +
                                    std::to_string(want_in) + " for variant " +
                                    variant_name(cfg.variant));
    }
    std::optional<Curvature> curv;
    if (cfg.d_hyperbolic()) {
        curv = Curvature(*cfg.c_d);
    }
    return build_network({cfg.d_tags, widths, curv, true}, init_rng);
}

void validate_network(const Network& net, bool is_discriminator) {
    bool in_ball = false;
    bool saw_hyperbolic = false;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const Layer& layer = net.layers[i];
        const std::string at = "layer " + std::to_string(i);
        if (std::holds_alternative<ExpMapBoundary>(layer)) {
            if (in_ball) throw std::logic_error(at + ": exp map inside ball segment");
            in_ball = true;
        } else if (std::holds_alternative<LogMapBoundary>(layer)) {
            if (!in_ball) throw std::logic_error(at + ": log map outside ball segment");
            in_ball = false;
        } else if (std::holds_alternative<HyperbolicLinear>(layer) ||
                   std::holds_alternative<HyperbolicLeakyReLU>(layer)) {
            if (!in_ball) throw std::logic_error(at + ": hyperbolic layer outside ball segment");
            saw_hyperbolic = true;
        } else {
            if (in_ball) throw std::logic_error(at + ": euclidean layer inside ball segment");
        }
    }
    if (in_ball && !is_discriminator) {
        throw std::logic_error("generator must end in euclidean space");
    }
    if (saw_hyperbolic && !net.curvature) {
        throw std::logic_error("hyperbolic layers present but network has no curvature");
    }
}

BoundNet bind(ad::Graph& g, const Network& net) {
    BoundNet bound;
    bound.graph = &g;
    bound.net = &net;
    bound.params.reserve(net.params.size());
    for (const Parameter& p : net.params) {
        bound.params.push_back(g.leaf(p.value));
    }
    return bound;
}

ad::Var BoundNet::forward(ad::Var x, bool training, RngState& rng) const {
    if (x.cols() != net->input_width) {
        throw ShapeError("forward: input width " + std::to_string(x.cols()) + " != expected " +
                         std::to_string(net->input_width));
    }
    ad::Var h = x;
    for (std::size_t i = 0; i < net->layers.size(); ++i) {
        try {
            const Layer& layer = net->layers[i];
            if (const auto* lin = std::get_if<EuclideanLinear>(&layer)) {
                h = layers::euclidean_linear_forward(params[lin->weight], params[lin->bias], h);
            } else if (const auto* hyp = std::get_if<HyperbolicLinear>(&layer)) {
                h = layers::hyperbolic_linear_forward(params[hyp->weight], params[hyp->bias], h,
                                                      *net->curvature);
            } else if (std::holds_alternative<ExpMapBoundary>(layer)) {
                h = poincare::exp_map_zero(h, *net->curvature);
            } else if (std::holds_alternative<LogMapBoundary>(layer)) {
                h = poincare::log_map_zero(h, *net->curvature);
            } else if (const auto* lrelu = std::get_if<LeakyReLULayer>(&layer)) {
                h = graph->leaky_relu(h, lrelu->slope);
            } else if (const auto* hrelu = std::get_if<HyperbolicLeakyReLU>(&layer)) {
                h = layers::hyperbolic_leaky_relu(h, hrelu->slope, *net->curvature);
            } else if (std::holds_alternative<TanhLayer>(layer)) {
                h = graph->tanh(h);
            } else if (const auto* drop = std::get_if<DropoutLayer>(&layer)) {
                h = layers::dropout_forward(h, drop->rate, rng, training);
            }
        } catch (const ad::NonFiniteError& e) {
            throw ad::NonFiniteError("layer " + std::to_string(i) + ": " + e.what());
        }
    }
    return h;
}

}  // namespace hypgan
