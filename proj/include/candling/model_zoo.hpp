// Copyright (c) 2026 @Squid Consultancy Group (SCG)
// All rights reserved.
// licensed under the apache license 2.0.

#ifndef CANDLING_MODEL_ZOO_HPP
#define CANDLING_MODEL_ZOO_HPP

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "candling/errors.hpp"
#include "candling/image.hpp"
#include "candling/label.hpp"
#include "candling/nn.hpp"
#include "candling/rng.hpp"

namespace candling::model {

/**
 * @brief Backbone catalog, fine-tuning policies, and classifier assembly.
 *
 * Four ImageNet-pretrained families are exposed by name, each adapted to a
 * two-class fertility head. A compact reference CNN covers offline and
 * smoke-test use where pretrained weights are unavailable.
 */

enum class FineTuneMode { full, head_only, last_n_blocks };

struct FineTunePolicy {
    FineTuneMode mode = FineTuneMode::full;
    int blocks = 0;  // meaningful for last_n_blocks only

    static FineTunePolicy full() { return {FineTuneMode::full, 0}; }
    static FineTunePolicy head_only() { return {FineTuneMode::head_only, 0}; }
    static FineTunePolicy last_blocks(int n) {
        if (n < 1)
            throw ConfigError("last_n_blocks needs a positive block count");
        return {FineTuneMode::last_n_blocks, n};
    }

    std::string str() const {
        switch (mode) {
            case FineTuneMode::full: return "full";
            case FineTuneMode::head_only: return "head_only";
            case FineTuneMode::last_n_blocks:
                return "last_n_blocks:" + std::to_string(blocks);
        }
        return "full";
    }

    static FineTunePolicy parse(const std::string& text) {
        if (text == "full") return full();
        if (text == "head_only") return head_only();
        const std::string prefix = "last_n_blocks:";
        if (text.rfind(prefix, 0) == 0) {
            try {
                return last_blocks(std::stoi(text.substr(prefix.size())));
            } catch (const ConfigError&) {
                throw;
            } catch (const std::exception&) {
                throw ConfigError("bad fine-tune policy '" + text + "'");
            }
        }
        throw ConfigError("bad fine-tune policy '" + text + "'");
    }

    bool operator==(const FineTunePolicy&) const = default;
};

struct BackboneSpec {
    std::string name;
    int layer_count = 0;  // published depth of the pretrained family
    std::int64_t trainable_params = 0;  // published total, used as reference
    int input_size = 224;
    std::string pretrained_source;  // empty = trains from scratch
    std::array<double, 3> mean{0.485, 0.456, 0.406};
    std::array<double, 3> stddev{0.229, 0.224, 0.225};
};

/// Name of the compact fallback network (not part of the pretrained list).
inline constexpr const char* kReferenceCnn = "reference_cnn";

namespace detail {

inline const std::vector<BackboneSpec>& full_catalog() {
    static const std::vector<BackboneSpec> catalog = [] {
        std::vector<BackboneSpec> v;
        v.push_back({"vgg16", 41, 134'200'000, 224, "imagenet",
                     {0.485, 0.456, 0.406},
                     {0.229, 0.224, 0.225}});
        v.push_back({"resnet50", 177, 23'800'000, 224, "imagenet",
                     {0.485, 0.456, 0.406},
                     {0.229, 0.224, 0.225}});
        v.push_back({"inceptionnet", 315, 21'800'000, 299, "imagenet",
                     {0.5, 0.5, 0.5},
                     {0.5, 0.5, 0.5}});
        v.push_back({"mobilenet", 154, 2'200'000, 224, "imagenet",
                     {0.485, 0.456, 0.406},
                     {0.229, 0.224, 0.225}});
        v.push_back({kReferenceCnn, 6, 64'802, 64, "",
                     {0.5, 0.5, 0.5},
                     {0.5, 0.5, 0.5}});
        return v;
    }();
    return catalog;
}

}  // namespace detail

/// The four pretrained backbone families, with their published reference
/// layer/parameter figures as metadata.
inline std::vector<BackboneSpec> list_backbones() {
    std::vector<BackboneSpec> out;
    for (const auto& spec : detail::full_catalog())
        if (!spec.pretrained_source.empty()) out.push_back(spec);
    return out;
}

inline const BackboneSpec& backbone_spec(const std::string& name) {
    for (const auto& spec : detail::full_catalog())
        if (spec.name == name) return spec;
    throw ConfigError("unknown backbone '" + name + "'");
}

namespace detail {

using nn::GraphDef;
using nn::PadMode;

inline void build_reference_graph(GraphDef& g, int input_size) {
    if (input_size < 16)
        throw ConfigError("reference cnn input must be at least 16 pixels");
    int x = g.input(3, input_size, input_size);
    const int widths[4] = {16, 32, 64, 64};
    for (int i = 0; i < 4; ++i) {
        const std::string name = "conv" + std::to_string(i + 1);
        g.block(name);
        x = g.conv(x, widths[i], 3, 1, PadMode::same, name);
        x = g.relu(x);
        x = g.maxpool(x, 2, 2, PadMode::valid);
    }
    x = g.global_avgpool(x);
    g.block("fc");
    x = g.dense(x, 64, "fc1");
    x = g.relu(x);
    g.block("head");
    x = g.dense(x, 2, "head");
    g.output(x);
}

inline void build_vgg16_graph(GraphDef& g) {
    int x = g.input(3, 224, 224);
    const int plan[5][2] = {{64, 2}, {128, 2}, {256, 3}, {512, 3}, {512, 3}};
    for (int b = 0; b < 5; ++b) {
        const std::string block = "block" + std::to_string(b + 1);
        g.block(block);
        for (int c = 0; c < plan[b][1]; ++c) {
            x = g.conv(x, plan[b][0], 3, 1, PadMode::same,
                       block + ".conv" + std::to_string(c + 1));
            x = g.relu(x);
        }
        x = g.maxpool(x, 2, 2, PadMode::valid);
    }
    x = g.flatten(x);
    g.block("fc");
    x = g.dense(x, 4096, "fc6");
    x = g.relu(x);
    x = g.dropout(x, 0.5);
    x = g.dense(x, 4096, "fc7");
    x = g.relu(x);
    x = g.dropout(x, 0.5);
    g.block("head");
    x = g.dense(x, 2, "head");
    g.output(x);
}

inline void build_resnet50_graph(GraphDef& g) {
    auto cb = [&](int x, int out, int k, int stride, const std::string& name) {
        x = g.conv(x, out, k, stride, PadMode::same, name, 1, false);
        return g.batchnorm(x, name + ".bn");
    };
    auto bottleneck = [&](int x, int mid, int out, int stride, bool project,
                          const std::string& name) {
        int y = g.relu(cb(x, mid, 1, 1, name + ".conv1"));
        y = g.relu(cb(y, mid, 3, stride, name + ".conv2"));
        y = cb(y, out, 1, 1, name + ".conv3");
        int shortcut = x;
        if (project) shortcut = cb(x, out, 1, stride, name + ".down");
        return g.relu(g.add(shortcut, y));
    };

    int x = g.input(3, 224, 224);
    g.block("conv1");
    x = g.relu(cb(x, 64, 7, 2, "conv1"));
    x = g.maxpool(x, 3, 2, PadMode::same);

    const int stages[4][3] = {
        {64, 256, 3}, {128, 512, 4}, {256, 1024, 6}, {512, 2048, 3}};
    for (int s = 0; s < 4; ++s) {
        const std::string block = "layer" + std::to_string(s + 1);
        g.block(block);
        const int mid = stages[s][0], out = stages[s][1], reps = stages[s][2];
        for (int r = 0; r < reps; ++r) {
            const int stride = (r == 0 && s > 0) ? 2 : 1;
            x = bottleneck(x, mid, out, stride, r == 0,
                           block + ".b" + std::to_string(r + 1));
        }
    }
    x = g.global_avgpool(x);
    g.block("head");
    x = g.dense(x, 128, "head.fc1");
    x = g.relu(x);
    x = g.dense(x, 2, "head.fc2");
    g.output(x);
}

inline void build_inception_graph(GraphDef& g) {
    auto cb = [&](int x, int out, int kh, int kw, int sh, int sw, PadMode pad,
                  const std::string& name) {
        x = g.conv2(x, out, kh, kw, sh, sw, pad, name, 1, false);
        x = g.batchnorm(x, name + ".bn");
        return g.relu(x);
    };
    auto cbs = [&](int x, int out, int k, int stride, PadMode pad,
                   const std::string& name) {
        return cb(x, out, k, k, stride, stride, pad, name);
    };

    int x = g.input(3, 299, 299);
    g.block("stem");
    x = cbs(x, 32, 3, 2, PadMode::valid, "stem.conv1");
    x = cbs(x, 32, 3, 1, PadMode::valid, "stem.conv2");
    x = cbs(x, 64, 3, 1, PadMode::same, "stem.conv3");
    x = g.maxpool(x, 3, 2, PadMode::valid);
    x = cbs(x, 80, 1, 1, PadMode::valid, "stem.conv4");
    x = cbs(x, 192, 3, 1, PadMode::valid, "stem.conv5");
    x = g.maxpool(x, 3, 2, PadMode::valid);

    // 35x35 modules: double-3x3 towers next to 5x5 and pooled 1x1 branches.
    auto inception_a = [&](int in, int pool_c, const std::string& name) {
        const std::string p = name + ".";
        int b1 = cbs(in, 64, 1, 1, PadMode::same, p + "b1x1");
        int b5 = cbs(in, 48, 1, 1, PadMode::same, p + "b5x5_1");
        b5 = cbs(b5, 64, 5, 1, PadMode::same, p + "b5x5_2");
        int b3 = cbs(in, 64, 1, 1, PadMode::same, p + "b3x3_1");
        b3 = cbs(b3, 96, 3, 1, PadMode::same, p + "b3x3_2");
        b3 = cbs(b3, 96, 3, 1, PadMode::same, p + "b3x3_3");
        int bp = g.avgpool(in, 3, 1, PadMode::same);
        bp = cbs(bp, pool_c, 1, 1, PadMode::same, p + "pool");
        return g.concat({b1, b5, b3, bp});
    };
    g.block("mixed0");
    x = inception_a(x, 32, "mixed0");
    g.block("mixed1");
    x = inception_a(x, 64, "mixed1");
    g.block("mixed2");
    x = inception_a(x, 64, "mixed2");

    // Reduction to 17x17.
    g.block("mixed3");
    {
        int b3 = cbs(x, 384, 3, 2, PadMode::valid, "mixed3.b3x3");
        int bd = cbs(x, 64, 1, 1, PadMode::same, "mixed3.dbl_1");
        bd = cbs(bd, 96, 3, 1, PadMode::same, "mixed3.dbl_2");
        bd = cbs(bd, 96, 3, 2, PadMode::valid, "mixed3.dbl_3");
        int bp = g.maxpool(x, 3, 2, PadMode::valid);
        x = g.concat({b3, bd, bp});
    }

    // 17x17 modules with factorized 7x7 convolutions.
    auto inception_b = [&](int in, int c7, const std::string& name) {
        const std::string p = name + ".";
        int b1 = cbs(in, 192, 1, 1, PadMode::same, p + "b1x1");
        int b7 = cbs(in, c7, 1, 1, PadMode::same, p + "b7_1");
        b7 = cb(b7, c7, 1, 7, 1, 1, PadMode::same, p + "b7_2");
        b7 = cb(b7, 192, 7, 1, 1, 1, PadMode::same, p + "b7_3");
        int bd = cbs(in, c7, 1, 1, PadMode::same, p + "dbl_1");
        bd = cb(bd, c7, 7, 1, 1, 1, PadMode::same, p + "dbl_2");
        bd = cb(bd, c7, 1, 7, 1, 1, PadMode::same, p + "dbl_3");
        bd = cb(bd, c7, 7, 1, 1, 1, PadMode::same, p + "dbl_4");
        bd = cb(bd, 192, 1, 7, 1, 1, PadMode::same, p + "dbl_5");
        int bp = g.avgpool(in, 3, 1, PadMode::same);
        bp = cbs(bp, 192, 1, 1, PadMode::same, p + "pool");
        return g.concat({b1, b7, bd, bp});
    };
    const int c7s[4] = {128, 160, 160, 192};
    for (int i = 0; i < 4; ++i) {
        const std::string name = "mixed" + std::to_string(4 + i);
        g.block(name);
        x = inception_b(x, c7s[i], name);
    }

    // Reduction to 8x8.
    g.block("mixed8");
    {
        int b3 = cbs(x, 192, 1, 1, PadMode::same, "mixed8.b3_1");
        b3 = cbs(b3, 320, 3, 2, PadMode::valid, "mixed8.b3_2");
        int b7 = cbs(x, 192, 1, 1, PadMode::same, "mixed8.b7_1");
        b7 = cb(b7, 192, 1, 7, 1, 1, PadMode::same, "mixed8.b7_2");
        b7 = cb(b7, 192, 7, 1, 1, 1, PadMode::same, "mixed8.b7_3");
        b7 = cbs(b7, 192, 3, 2, PadMode::valid, "mixed8.b7_4");
        int bp = g.maxpool(x, 3, 2, PadMode::valid);
        x = g.concat({b3, b7, bp});
    }

    // 8x8 modules with split 3x1 / 1x3 towers.
    auto inception_c = [&](int in, const std::string& name) {
        const std::string p = name + ".";
        int b1 = cbs(in, 320, 1, 1, PadMode::same, p + "b1x1");
        int b3 = cbs(in, 384, 1, 1, PadMode::same, p + "b3_1");
        int b3a = cb(b3, 384, 1, 3, 1, 1, PadMode::same, p + "b3_2a");
        int b3b = cb(b3, 384, 3, 1, 1, 1, PadMode::same, p + "b3_2b");
        int bd = cbs(in, 448, 1, 1, PadMode::same, p + "dbl_1");
        bd = cbs(bd, 384, 3, 1, PadMode::same, p + "dbl_2");
        int bda = cb(bd, 384, 1, 3, 1, 1, PadMode::same, p + "dbl_3a");
        int bdb = cb(bd, 384, 3, 1, 1, 1, PadMode::same, p + "dbl_3b");
        int bp = g.avgpool(in, 3, 1, PadMode::same);
        bp = cbs(bp, 192, 1, 1, PadMode::same, p + "pool");
        return g.concat({b1, b3a, b3b, bda, bdb, bp});
    };
    g.block("mixed9");
    x = inception_c(x, "mixed9");
    g.block("mixed10");
    x = inception_c(x, "mixed10");

    x = g.global_avgpool(x);
    g.block("head");
    x = g.dense(x, 2, "head");
    g.output(x);
}

inline void build_mobilenet_graph(GraphDef& g) {
    auto cb6 = [&](int x, int out, int k, int stride, int groups,
                   const std::string& name) {
        x = g.conv(x, out, k, stride, PadMode::same, name, groups, false);
        x = g.batchnorm(x, name + ".bn");
        return g.relu6(x);
    };

    int x = g.input(3, 224, 224);
    g.block("stem");
    x = cb6(x, 32, 3, 2, 1, "stem.conv");

    int in_c = 32;
    int block_no = 0;
    auto inverted_residual = [&](int x, int out_c, int expand, int stride) {
        ++block_no;
        const std::string name = "block" + std::to_string(block_no);
        g.block(name);
        int y = x;
        const int mid = in_c * expand;
        if (expand != 1) y = cb6(y, mid, 1, 1, 1, name + ".expand");
        y = cb6(y, mid, 3, stride, mid, name + ".dw");
        y = g.conv(y, out_c, 1, 1, PadMode::same, name + ".project", 1,
                   false);
        y = g.batchnorm(y, name + ".project.bn");
        if (stride == 1 && in_c == out_c) y = g.add(x, y);
        in_c = out_c;
        return y;
    };

    const int table[7][4] = {{1, 16, 1, 1},  {6, 24, 2, 2}, {6, 32, 3, 2},
                             {6, 64, 4, 2},  {6, 96, 3, 1}, {6, 160, 3, 2},
                             {6, 320, 1, 1}};
    for (const auto& row : table) {
        for (int r = 0; r < row[2]; ++r)
            x = inverted_residual(x, row[1], row[0], r == 0 ? row[3] : 1);
    }
    g.block("top");
    x = cb6(x, 1280, 1, 1, 1, "top.conv");
    x = g.global_avgpool(x);
    g.block("head");
    x = g.dense(x, 2, "head");
    g.output(x);
}

}  // namespace detail

/// Builds the computation graph for a catalog backbone, two-class head
/// included. The reference CNN accepts a custom square input size.
inline nn::GraphDef build_graph(const std::string& name, int input_size = 0) {
    nn::GraphDef g;
    if (name == kReferenceCnn) {
        detail::build_reference_graph(
            g, input_size > 0 ? input_size
                              : backbone_spec(kReferenceCnn).input_size);
    } else if (name == "vgg16") {
        detail::build_vgg16_graph(g);
    } else if (name == "resnet50") {
        detail::build_resnet50_graph(g);
    } else if (name == "inceptionnet") {
        detail::build_inception_graph(g);
    } else if (name == "mobilenet") {
        detail::build_mobilenet_graph(g);
    } else {
        throw ConfigError("unknown backbone '" + name + "'");
    }
    return g;
}

/// Per-parameter trainability under a policy: head parameters always train,
/// body blocks follow the policy, batchnorm statistics never train.
inline std::vector<char> effective_trainable(const nn::GraphDef& g,
                                             const FineTunePolicy& policy) {
    std::vector<std::string> body;
    for (const auto& b : g.block_order)
        if (b != "head") body.push_back(b);
    std::size_t first_on = body.size();
    switch (policy.mode) {
        case FineTuneMode::full: first_on = 0; break;
        case FineTuneMode::head_only: first_on = body.size(); break;
        case FineTuneMode::last_n_blocks:
            first_on = body.size() -
                       std::min<std::size_t>(
                           body.size(), static_cast<std::size_t>(
                                            std::max(policy.blocks, 0)));
            break;
    }
    std::set<std::string> enabled(body.begin() +
                                      static_cast<std::ptrdiff_t>(first_on),
                                  body.end());
    std::vector<char> out;
    out.reserve(g.params.size());
    for (const auto& spec : g.params) {
        const bool on = spec.kind == nn::ParamKind::weight &&
                        (spec.block == "head" ||
                         enabled.count(spec.block) > 0);
        out.push_back(on ? 1 : 0);
    }
    return out;
}

/// Trainable-parameter total for a backbone/policy pair, computed from the
/// graph definition alone (no weight allocation).
inline std::int64_t count_trainable_parameters(const std::string& backbone,
                                               const FineTunePolicy& policy) {
    const nn::GraphDef g = build_graph(backbone);
    const auto flags = effective_trainable(g, policy);
    std::int64_t total = 0;
    for (std::size_t i = 0; i < g.params.size(); ++i)
        if (flags[i]) total += static_cast<std::int64_t>(g.params[i].numel());
    return total;
}

struct ClassifierModel {
    BackboneSpec spec;
    FineTunePolicy policy;
    std::uint64_t seed = 0;
    nn::GraphDef graph;
    nn::ParameterStore<float> params;

    int input_size() const { return graph.in_h; }
};

inline std::int64_t count_trainable_parameters(const ClassifierModel& m) {
    std::int64_t total = 0;
    for (std::size_t i = 0; i < m.graph.params.size(); ++i)
        if (m.params.trainable[i])
            total += static_cast<std::int64_t>(m.graph.params[i].numel());
    return total;
}

struct BuildOptions {
    std::filesystem::path cache_dir;
    bool offline = false;
};

namespace detail {

inline constexpr char kCheckpointMagic[9] = "CNDL0001";

inline void write_exact(std::ofstream& out, const void* data,
                        std::size_t bytes) {
    out.write(static_cast<const char*>(data),
              static_cast<std::streamsize>(bytes));
}

struct CheckpointHeader {
    std::string backbone;
    std::string policy;
    std::uint64_t seed = 0;
    int input_size = 0;
    nlohmann::json params;  // [{name, shape, trainable}]
};

inline CheckpointHeader read_checkpoint_header(std::ifstream& in,
                                               const std::string& path) {
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != std::string(kCheckpointMagic, 8))
        throw DecodeError("not a checkpoint file: " + path);
    std::uint32_t header_len = 0;
    in.read(reinterpret_cast<char*>(&header_len), 4);
    if (!in || header_len == 0 || header_len > (1u << 24))
        throw DecodeError("corrupt checkpoint header: " + path);
    std::string text(header_len, '\0');
    in.read(text.data(), header_len);
    if (!in) throw DecodeError("truncated checkpoint header: " + path);
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.contains("backbone") || !j.contains("params"))
        throw DecodeError("corrupt checkpoint header: " + path);
    CheckpointHeader h;
    h.backbone = j.at("backbone").get<std::string>();
    h.policy = j.value("fine_tune_policy", std::string("full"));
    h.seed = j.value("seed", std::uint64_t{0});
    h.input_size = j.value("input_size", 0);
    h.params = j.at("params");
    return h;
}

}  // namespace detail

/// Writes the model to a self-describing checkpoint: a magic tag, a JSON
/// header (backbone, policy, seed, parameter manifest), then raw f32 blobs
/// in header order.
inline void save_checkpoint(const ClassifierModel& m,
                            const std::filesystem::path& path) {
    static_assert(std::endian::native == std::endian::little,
                  "checkpoint blobs are little-endian");
    std::error_code ec;
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path(), ec);
    nlohmann::ordered_json header;
    header["backbone"] = m.spec.name;
    header["fine_tune_policy"] = m.policy.str();
    header["seed"] = m.seed;
    header["input_size"] = m.input_size();
    auto& params = header["params"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < m.graph.params.size(); ++i) {
        const auto& spec = m.graph.params[i];
        nlohmann::ordered_json p;
        p["name"] = spec.name;
        p["shape"] = spec.shape;
        p["trainable"] = static_cast<bool>(m.params.trainable[i]);
        params.push_back(std::move(p));
    }
    const std::string text = header.dump();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write checkpoint: " + path.string());
    detail::write_exact(out, detail::kCheckpointMagic, 8);
    const std::uint32_t len = static_cast<std::uint32_t>(text.size());
    detail::write_exact(out, &len, 4);
    detail::write_exact(out, text.data(), text.size());
    for (const auto& tensor : m.params.value)
        detail::write_exact(out, tensor.data.data(),
                            tensor.data.size() * sizeof(float));
    if (!out) throw IoError("cannot write checkpoint: " + path.string());
}

namespace detail {

/// Copies pretrained body weights from a cache checkpoint into the model.
/// Head parameters in the file are skipped; every non-head parameter of the
/// model must be present with a matching shape.
inline void load_backbone_weights(ClassifierModel& m,
                                  const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw WeightsUnavailableError("no cached weights for " + m.spec.name +
                                      " at " + path.string());
    const CheckpointHeader h = read_checkpoint_header(in, path.string());
    if (h.backbone != m.spec.name)
        throw DecodeError("cached weights are for '" + h.backbone + "'");

    std::set<std::string> filled;
    for (const auto& entry : h.params) {
        const std::string name = entry.at("name").get<std::string>();
        const std::vector<int> shape =
            entry.at("shape").get<std::vector<int>>();
        std::size_t numel = 1;
        for (int d : shape) numel *= static_cast<std::size_t>(d);
        const int idx = m.graph.find_param(name);
        const bool is_head =
            idx >= 0 &&
            m.graph.params[static_cast<std::size_t>(idx)].block == "head";
        if (idx < 0 || is_head) {
            in.seekg(static_cast<std::streamoff>(numel * sizeof(float)),
                     std::ios::cur);
            continue;
        }
        auto& tensor = m.params.value[static_cast<std::size_t>(idx)];
        if (m.graph.params[static_cast<std::size_t>(idx)].shape != shape)
            throw DecodeError("cached weight shape mismatch for " + name);
        in.read(reinterpret_cast<char*>(tensor.data.data()),
                static_cast<std::streamsize>(numel * sizeof(float)));
        if (!in) throw DecodeError("truncated checkpoint blob: " + name);
        filled.insert(name);
    }
    for (const auto& spec : m.graph.params) {
        if (spec.block == "head") continue;
        if (!filled.count(spec.name))
            throw WeightsUnavailableError("cached weights for " +
                                          m.spec.name + " lack " + spec.name);
    }
}

}  // namespace detail

/// Assembles a classifier: pretrained body from the weight cache, fresh
/// seed-deterministic two-class head, trainability per policy. Offline mode
/// refuses pretrained families outright; the reference CNN always builds.
inline ClassifierModel build_classifier(const BackboneSpec& spec,
                                        const FineTunePolicy& policy,
                                        std::uint64_t seed,
                                        const BuildOptions& opts = {}) {
    ClassifierModel m;
    m.spec = spec;
    m.policy = policy;
    m.seed = seed;
    m.graph = build_graph(spec.name);
    m.params.allocate(m.graph);
    nn::init_parameters(m.graph, m.params, derive_seed(seed, "init"));
    if (!spec.pretrained_source.empty()) {
        if (opts.offline)
            throw WeightsUnavailableError(
                "offline mode blocks pretrained weights for " + spec.name);
        detail::load_backbone_weights(
            m, opts.cache_dir / (spec.name + ".ckpt"));
    }
    const auto flags = effective_trainable(m.graph, policy);
    for (std::size_t i = 0; i < flags.size(); ++i)
        m.params.trainable[i] = flags[i];
    return m;
}

inline ClassifierModel build_classifier(const std::string& backbone,
                                        const FineTunePolicy& policy,
                                        std::uint64_t seed,
                                        const BuildOptions& opts = {}) {
    return build_classifier(backbone_spec(backbone), policy, seed, opts);
}

/// Compact stand-in classifier that needs no pretrained weights. Global
/// average pooling keeps its parameter count independent of input size.
inline ClassifierModel build_reference_cnn(int input_size,
                                           std::uint64_t seed) {
    ClassifierModel m;
    m.spec = backbone_spec(kReferenceCnn);
    m.spec.input_size = input_size;
    m.policy = FineTunePolicy::full();
    m.seed = seed;
    m.graph = build_graph(kReferenceCnn, input_size);
    m.params.allocate(m.graph);
    nn::init_parameters(m.graph, m.params, derive_seed(seed, "init"));
    const auto flags = effective_trainable(m.graph, m.policy);
    for (std::size_t i = 0; i < flags.size(); ++i)
        m.params.trainable[i] = flags[i];
    return m;
}

/// Restores a model saved with save_checkpoint, trainability included.
inline ClassifierModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingArtifactError("checkpoint not found: " +
                                        path.string());
    const detail::CheckpointHeader h =
        detail::read_checkpoint_header(in, path.string());
    ClassifierModel m;
    try {
        m.spec = backbone_spec(h.backbone);
    } catch (const ConfigError&) {
        throw DecodeError("checkpoint names unknown backbone '" +
                          h.backbone + "'");
    }
    m.policy = FineTunePolicy::parse(h.policy);
    m.seed = h.seed;
    m.graph = build_graph(h.backbone, h.input_size);
    m.spec.input_size = m.graph.in_h;
    m.params.allocate(m.graph);
    if (h.params.size() != m.graph.params.size())
        throw DecodeError("checkpoint parameter list mismatch");
    for (std::size_t i = 0; i < m.graph.params.size(); ++i) {
        const auto& entry = h.params[i];
        const auto& spec = m.graph.params[i];
        if (entry.at("name").get<std::string>() != spec.name ||
            entry.at("shape").get<std::vector<int>>() != spec.shape)
            throw DecodeError("checkpoint parameter list mismatch");
        auto& tensor = m.params.value[i];
        in.read(reinterpret_cast<char*>(tensor.data.data()),
                static_cast<std::streamsize>(tensor.data.size() *
                                             sizeof(float)));
        if (!in)
            throw DecodeError("truncated checkpoint blob: " + spec.name);
        m.params.trainable[i] = entry.value("trainable", false) ? 1 : 0;
    }
    return m;
}

/// Fertile sits at logit index 0, infertile at 1.
inline int class_index(Label label) {
    return label == Label::fertile ? 0 : 1;
}

inline Label label_at_index(int index) {
    return index == 0 ? Label::fertile : Label::infertile;
}

/// Packs images into a normalized NCHW batch for the given backbone.
inline Tensor<float> to_input_tensor(const std::vector<Image>& images,
                                     const BackboneSpec& spec) {
    const int side = spec.input_size;
    Tensor<float> batch(
        {static_cast<int>(images.size()), 3, side, side});
    float* out = batch.ptr();
    for (std::size_t s = 0; s < images.size(); ++s) {
        const Image& img = images[s];
        if (img.height != side || img.width != side || img.channels != 3)
            throw InputShapeError(
                "image " + std::to_string(s) + " is " +
                std::to_string(img.height) + "x" + std::to_string(img.width) +
                "x" + std::to_string(img.channels) + ", expected " +
                std::to_string(side) + "x" + std::to_string(side) + "x3");
        for (int c = 0; c < 3; ++c) {
            const float mean = static_cast<float>(spec.mean[c]);
            const float inv_std =
                static_cast<float>(1.0 / spec.stddev[c]);
            float* plane =
                out + (s * 3 + static_cast<std::size_t>(c)) *
                          static_cast<std::size_t>(side) * side;
            for (int r = 0; r < side; ++r)
                for (int col = 0; col < side; ++col)
                    plane[r * side + col] =
                        (static_cast<float>(img.at(r, col, c)) / 255.0f -
                         mean) *
                        inv_std;
        }
    }
    return batch;
}

/// Class probabilities, one (fertile, infertile) row per image.
inline Tensor<float> class_probabilities(const ClassifierModel& m,
                                         const std::vector<Image>& images,
                                         int batch_size = 16) {
    Tensor<float> probs({static_cast<int>(images.size()), 2});
    nn::Workspace<float> ws;
    std::size_t done = 0;
    while (done < images.size()) {
        const std::size_t take = std::min<std::size_t>(
            static_cast<std::size_t>(batch_size), images.size() - done);
        const std::vector<Image> chunk(images.begin() +
                                           static_cast<std::ptrdiff_t>(done),
                                       images.begin() +
                                           static_cast<std::ptrdiff_t>(
                                               done + take));
        const Tensor<float> input = to_input_tensor(chunk, m.spec);
        const Tensor<float>& logits =
            nn::forward(m.graph, m.params, ws, input, false);
        const Tensor<float> p = nn::softmax_rows(logits);
        std::copy(p.data.begin(), p.data.end(),
                  probs.data.begin() + static_cast<std::ptrdiff_t>(2 * done));
        done += take;
    }
    return probs;
}

struct PredictionBatch {
    std::vector<std::string> ids;
    std::vector<double> scores;      // probability of fertile, in [0,1]
    std::vector<Label> predicted;    // fertile iff score >= 0.5
};

/// Inference over preprocessed images already sized for the model.
inline PredictionBatch predict(const ClassifierModel& m,
                               const std::vector<std::string>& ids,
                               const std::vector<Image>& images,
                               int batch_size = 16) {
    if (ids.size() != images.size())
        throw InputMismatchError("ids and images differ in length");
    const Tensor<float> probs = class_probabilities(m, images, batch_size);
    PredictionBatch out;
    out.ids = ids;
    out.scores.reserve(ids.size());
    out.predicted.reserve(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const double fertile_p = probs.data[2 * i];
        out.scores.push_back(fertile_p);
        out.predicted.push_back(fertile_p >= 0.5 ? Label::fertile
                                                 : Label::infertile);
    }
    return out;
}

}  // namespace candling::model

#endif  // CANDLING_MODEL_ZOO_HPP
