#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypgan/layers.hpp"

namespace hypgan {

enum class Variant { GAN, CGAN, WGAN_GP };

const char* variant_name(Variant v);
Variant parse_variant(const std::string& name);

// Parsed architecture string, e.g. "D_ehhh G_eehe cd=1e-5 cg=1e-3".
// Tags read input-to-output; boundary exp/log maps are implicit and inserted
// by the builders around each maximal run of 'h' layers.
struct ArchConfig {
    std::string d_tags = "eeee";
    std::string g_tags = "eeee";
    std::optional<double> c_d;
    std::optional<double> c_g;
    Variant variant = Variant::GAN;

    bool d_hyperbolic() const { return d_tags.find('h') != std::string::npos; }
    bool g_hyperbolic() const { return g_tags.find('h') != std::string::npos; }

    bool operator==(const ArchConfig&) const = default;
};

// Grammar: D_[eh]{4} G_[eh]{4} with optional `cd=<float>` / `cg=<float>`.
// A curvature must be present iff the corresponding network has an 'h' tag.
ArchConfig parse_config(const std::string& text);
std::string render_config(const ArchConfig& cfg);

struct Parameter {
    std::string name;
    Tensor value;
};

struct Network {
    std::vector<Layer> layers;
    std::vector<Parameter> params;
    std::optional<Curvature> curvature;
    std::int64_t input_width = 0;
    std::int64_t output_width = 0;
};

inline constexpr std::int64_t kImageDim = 784;
inline constexpr std::int64_t kNoiseDim = 128;
inline constexpr std::int64_t kLabelDim = 10;
inline constexpr double kLeakySlope = 0.2;
inline constexpr double kDropoutRate = 0.1;

std::vector<std::int64_t> default_generator_widths(Variant v);
std::vector<std::int64_t> default_discriminator_widths(Variant v);

// widths = layer sizes from input to output, length 5 (input + 4 layers).
// Hidden activations are LeakyReLU(0.2) (direct-on-ball inside h runs); the
// generator ends in Tanh, the discriminator output has no activation and no
// final log map when its last tag is 'h'. Discriminator euclidean hidden
// layers carry Dropout(0.1).
Network build_generator(const ArchConfig& cfg, const std::vector<std::int64_t>& widths,
                        RngState& init_rng);
Network build_discriminator(const ArchConfig& cfg, const std::vector<std::int64_t>& widths,
                            RngState& init_rng);

// Checks the euclidean/ball space discipline layer by layer; throws on any
// violation (used by the builders and exhaustively by tests).
void validate_network(const Network& net, bool is_discriminator);

// Per-graph view of a network: one leaf per parameter plus a forward pass.
struct BoundNet {
    ad::Graph* graph = nullptr;
    const Network* net = nullptr;
    std::vector<ad::Var> params;

    ad::Var forward(ad::Var x, bool training, RngState& rng) const;
};

BoundNet bind(ad::Graph& g, const Network& net);

}  // namespace hypgan
