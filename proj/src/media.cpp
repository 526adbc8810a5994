#include "agentos/media.hpp"

#include <array>
#include <fstream>
#include <regex>

#include <spdlog/spdlog.h>
#include <zlib.h>

#include "agentos/error.hpp"
#include "agentos/runtime.hpp"
#include "agentos/util.hpp"

namespace agentos {

const std::vector<std::string> kImageGeneratorKeys = {
    "ANTHROPIC_API_KEY", "TOGETHER_API_KEY", "HEURIST_API_KEY", "OPENAI_API_KEY", "FAL_API_KEY",
};

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>(v & 0xFF));
}

void put_chunk(std::string& out, const char* type, const std::string& data) {
    put_u32(out, static_cast<std::uint32_t>(data.size()));
    std::string body(type, 4);
    body += data;
    out += body;
    const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
    put_u32(out, static_cast<std::uint32_t>(crc));
}

std::optional<int> int_option(const ActionOptions& options, const char* key) {
    auto it = options.find(key);
    if (it == options.end()) return std::nullopt;
    try {
        std::size_t used = 0;
        const int v = std::stoi(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument(key);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, std::string(key) + " must be an integer");
    }
}

std::string unique_suffix(std::string_view prompt, const ImageOptions& options, int index) {
    const std::string key = std::string(prompt) + "|" + std::to_string(options.seed_or_default()) + "|" +
                            std::to_string(options.width_or_default()) + "x" +
                            std::to_string(options.height_or_default()) + "|" + std::to_string(index);
    return to_hex(stable_hash64(key)).substr(0, 12);
}

} // namespace

void validate_image_options(const ImageOptions& o) {
    auto in_range = [](const std::optional<int>& v, int lo, int hi) { return !v || (*v >= lo && *v <= hi); };
    if (!in_range(o.width, 16, 4096)) throw Error(ErrorCode::InvalidArgument, "width must be in [16, 4096]");
    if (!in_range(o.height, 16, 4096)) throw Error(ErrorCode::InvalidArgument, "height must be in [16, 4096]");
    if (!in_range(o.count, 1, 8)) throw Error(ErrorCode::InvalidArgument, "count must be in [1, 8]");
    if (o.num_iterations && *o.num_iterations < 1) {
        throw Error(ErrorCode::InvalidArgument, "numIterations must be positive");
    }
    if (o.guidance_scale && *o.guidance_scale < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "guidanceScale must not be negative");
    }
}

ImageOptions image_options_from(const ActionOptions& options) {
    ImageOptions o;
    o.width = int_option(options, "width");
    o.height = int_option(options, "height");
    o.count = int_option(options, "count");
    o.num_iterations = int_option(options, "numIterations");
    if (auto it = options.find("seed"); it != options.end()) {
        try {
            o.seed = std::stoll(it->second);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "seed must be an integer");
        }
    }
    if (auto it = options.find("guidanceScale"); it != options.end()) {
        try {
            o.guidance_scale = std::stod(it->second);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "guidanceScale must be a number");
        }
    }
    if (auto it = options.find("negativePrompt"); it != options.end()) o.negative_prompt = it->second;
    if (auto it = options.find("modelId"); it != options.end()) o.model_id = it->second;
    if (auto it = options.find("stylePreset"); it != options.end()) o.style_preset = it->second;
    if (auto it = options.find("hideWatermark"); it != options.end()) {
        o.hide_watermark = it->second == "true" || it->second == "1";
    }
    validate_image_options(o);
    return o;
}

PlaceholderSignature placeholder_signature(std::string_view prompt, std::int64_t seed) {
    const auto digest = sha256(std::string(prompt) + ":" + std::to_string(seed));
    PlaceholderSignature sig{};
    for (int i = 0; i < 3; ++i) sig.rgb[i] = digest[i];
    for (int i = 0; i < 4; ++i) sig.tag[i] = digest[3 + i];
    return sig;
}

std::string generate_placeholder(std::string_view prompt, const ImageOptions& options) {
    validate_image_options(options);
    const auto width = static_cast<std::uint32_t>(options.width_or_default());
    const auto height = static_cast<std::uint32_t>(options.height_or_default());
    const auto sig = placeholder_signature(prompt, options.seed_or_default());

    const std::size_t stride = 1 + 3 * static_cast<std::size_t>(width);
    std::string raw(stride * height, '\0');
    for (std::uint32_t y = 0; y < height; ++y) {
        char* row = raw.data() + y * stride;
        row[0] = 0; // filter: none
        for (std::uint32_t x = 0; x < width; ++x) {
            for (int c = 0; c < 3; ++c) row[1 + 3 * x + c] = static_cast<char>(sig.rgb[c]);
        }
    }
    for (std::uint32_t x = 0; x < 4; ++x) {
        for (int c = 0; c < 3; ++c) raw[1 + 3 * x + c] = static_cast<char>(sig.tag[x]);
    }

    uLongf compressed_size = compressBound(static_cast<uLong>(raw.size()));
    std::string compressed(compressed_size, '\0');
    if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &compressed_size,
                  reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()), 9) != Z_OK) {
        throw Error(ErrorCode::WriteFailure, "png compression failed");
    }
    compressed.resize(compressed_size);

    std::string png("\x89PNG\r\n\x1a\n", 8);
    std::string ihdr;
    put_u32(ihdr, width);
    put_u32(ihdr, height);
    ihdr += std::string("\x08\x02\x00\x00\x00", 5); // 8-bit RGB, deflate, no filter, no interlace
    put_chunk(png, "IHDR", ihdr);
    put_chunk(png, "IDAT", compressed);
    put_chunk(png, "IEND", "");
    return png;
}

std::string sanitize_filename(std::string_view name) {
    std::string out;
    for (char c : name) {
        const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-';
        out.push_back(ok ? c : '_');
    }
    return out.empty() ? "image" : out;
}

std::filesystem::path save_base64_image(std::string_view base64_data, std::string_view filename,
                                        const std::filesystem::path& base_dir) {
    static const std::regex prefix(R"(^data:image/\w+;base64,)");
    std::string payload = std::regex_replace(std::string(base64_data), prefix, "",
                                             std::regex_constants::format_first_only);
    auto bytes = base64_decode(payload);
    if (!bytes) throw Error(ErrorCode::InvalidBase64, "image payload is not valid base64");

    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path dir = fs::absolute(base_dir, ec) / kImageDir;
    if (ec) throw Error(ErrorCode::WriteFailure, ec.message());
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::WriteFailure, dir.string() + ": " + ec.message());

    const fs::path target = dir / (sanitize_filename(filename) + ".png");
    const fs::path tmp = dir / ("." + sanitize_filename(filename) + ".png.tmp" +
                                to_hex(stable_hash64(target.string() + std::to_string(bytes->size()))).substr(0, 6));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::WriteFailure, tmp.string());
        out.write(bytes->data(), static_cast<std::streamsize>(bytes->size()));
        if (!out) throw Error(ErrorCode::WriteFailure, tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::WriteFailure, target.string());
    }
    return target;
}

ImageResponse handle_image_response(const std::filesystem::path& filepath, std::string_view filename) {
    Attachment a;
    a.id = "img-" + to_hex(stable_hash64(filepath.string())).substr(0, 12);
    a.url = filepath.string();
    a.title = "Generated image";
    a.source = "imageGeneration";
    a.description = std::string(filename);
    a.content_type = "image/png";

    ImageResponse out;
    out.reply.text = kImageReplyText;
    out.reply.attachments.push_back(std::move(a));
    out.file_attachments.push_back({filepath.string(), std::string(filename) + ".png"});
    return out;
}

std::string extract_image_prompt(std::string_view text) {
    static const std::vector<std::vector<std::string>> triggers = {
        {"generate", "image"}, {"image", "generation"}, {"create", "image"}, {"make", "a"},
        {"draw"},              {"generate"},            {"image"},
    };
    auto tokens = tokenize(text);
    std::vector<bool> drop(tokens.size(), false);
    for (const auto& phrase : triggers) {
        for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
            if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
                for (std::size_t j = 0; j < phrase.size(); ++j) drop[i + j] = true;
            }
        }
    }
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (!drop[i]) kept.push_back(tokens[i]);
    }
    if (kept.empty()) return std::string(trim(text));
    return join(kept, " ");
}

PluginDef media_plugin(MediaConfig config) {
    ActionDef a;
    a.name = "GENERATE_IMAGE";
    a.similes = {"IMAGE_GENERATION", "MAKE_A", "CREATE_IMAGE", "DRAW"};
    a.description = "Generate an image to go along with the message.";
    a.validate = [](Runtime& runtime, const MemoryRecord&) {
        if (runtime.get_setting("PLACEHOLDER_GEN").value_or("") == "1") return true;
        return std::any_of(kImageGeneratorKeys.begin(), kImageGeneratorKeys.end(), [&](const std::string& key) {
            auto v = runtime.get_setting(key);
            return v && !v->empty();
        });
    };
    a.handler = [base = config.base_dir](Runtime&, const MemoryRecord& message, const State&,
                                         const ActionOptions& options, ReplySink& sink) {
        const auto opts = image_options_from(options);
        const auto prompt = extract_image_prompt(message.content.text);
        Content reply;
        reply.text = kImageReplyText;
        for (int i = 0; i < opts.count_or_default(); ++i) {
            const auto png = generate_placeholder(prompt, opts);
            const std::string filename =
                sanitize_filename(prompt.substr(0, 24)) + "_" + unique_suffix(prompt, opts, i);
            const auto path = save_base64_image("data:image/png;base64," + base64_encode(png), filename, base);
            auto response = handle_image_response(path, filename);
            for (auto& att : response.reply.attachments) reply.attachments.push_back(std::move(att));
        }
        spdlog::debug("generated {} image(s) for '{}'", reply.attachments.size(), prompt);
        sink.reply(std::move(reply));
        return true;
    };

    PluginDef p;
    p.name = "media";
    p.description = "Image generation with a deterministic placeholder backend.";
    p.actions.push_back(std::move(a));
    return p;
}

} // namespace agentos
