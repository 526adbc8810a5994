#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agentos/components.hpp"

namespace agentos {

inline constexpr const char* kImageDir = "generatedImages";
inline constexpr const char* kImageReplyText = "Image generated successfully";

/// Settings that enable image generation. Any one being non-empty is enough.
extern const std::vector<std::string> kImageGeneratorKeys;

struct ImageOptions {
    std::optional<int> width;
    std::optional<int> height;
    std::optional<int> count;
    std::optional<std::string> negative_prompt;
    std::optional<int> num_iterations;
    std::optional<double> guidance_scale;
    std::optional<std::int64_t> seed;
    std::optional<std::string> model_id;
    std::optional<std::string> style_preset;
    std::optional<bool> hide_watermark;

    int width_or_default() const { return width.value_or(512); }
    int height_or_default() const { return height.value_or(512); }
    int count_or_default() const { return count.value_or(1); }
    std::int64_t seed_or_default() const { return seed.value_or(0); }
};

/// Throws Error{InvalidArgument} naming the first out-of-range field.
void validate_image_options(const ImageOptions& options);

/// Reads width, height, count, negativePrompt, numIterations, guidanceScale,
/// seed, modelId, stylePreset and hideWatermark from action options.
ImageOptions image_options_from(const ActionOptions& options);

/// Deterministic RGB PNG filled with a colour derived from (prompt, seed); the
/// first four pixels of the top row carry a further 4-byte hash tag.
std::string generate_placeholder(std::string_view prompt, const ImageOptions& options);

/// The fill colour and tag generate_placeholder uses.
struct PlaceholderSignature {
    std::uint8_t rgb[3];
    std::uint8_t tag[4];
};
PlaceholderSignature placeholder_signature(std::string_view prompt, std::int64_t seed);

/// Keeps [A-Za-z0-9_-]; everything else becomes '_'. Empty input gives "image".
std::string sanitize_filename(std::string_view name);

/// Strips a data-URI prefix, decodes, writes <base_dir>/generatedImages/<filename>.png
/// and returns the absolute path. Throws Error{InvalidBase64} or Error{WriteFailure}.
std::filesystem::path save_base64_image(std::string_view base64_data, std::string_view filename,
                                        const std::filesystem::path& base_dir = std::filesystem::current_path());

struct FileAttachment {
    std::string attachment; // file path
    std::string name;
};

struct ImageResponse {
    Content reply;
    std::vector<FileAttachment> file_attachments;
};

ImageResponse handle_image_response(const std::filesystem::path& filepath, std::string_view filename);

/// Words the action strips from a message to get the image prompt.
std::string extract_image_prompt(std::string_view text);

struct MediaConfig {
    std::filesystem::path base_dir = std::filesystem::current_path();
};

/// GENERATE_IMAGE backed by the placeholder generator.
PluginDef media_plugin(MediaConfig config = {});

} // namespace agentos
