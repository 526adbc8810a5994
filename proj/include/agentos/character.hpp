#pragma once

#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentos/error.hpp"

namespace agentos {

struct MessageExample {
    std::string user;
    std::string text;

    bool operator==(const MessageExample&) const = default;
};

struct StyleGuide {
    std::vector<std::string> all;
    std::vector<std::string> chat;
    std::vector<std::string> post;

    bool operator==(const StyleGuide&) const = default;
};

struct CharacterSettings {
    std::map<std::string, std::string> secrets;
    std::optional<std::string> voice;

    bool operator==(const CharacterSettings&) const = default;
};

/// Persona configuration loaded from a character file.
///
/// File keys are lowerCamelCase (`modelProvider`, `messageExamples`, ...).
/// Unknown top-level keys survive a load/serialize cycle in `extra` but are
/// otherwise ignored.
struct Character {
    std::string name;
    std::string model_provider_id;
    std::vector<std::string> clients;
    std::vector<std::string> bio;
    std::vector<std::string> lore;
    std::vector<std::string> knowledge;
    std::vector<std::vector<MessageExample>> message_examples;
    std::vector<std::string> post_examples;
    std::vector<std::string> topics;
    std::vector<std::string> adjectives;
    StyleGuide style;
    std::vector<std::string> plugins;
    CharacterSettings settings;
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const Character&) const = default;
};

struct Violation {
    std::string path;
    std::string message;

    bool operator==(const Violation&) const = default;
};

class SchemaError : public Error {
public:
    explicit SchemaError(std::vector<Violation> violations);

    const std::vector<Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<Violation> violations_;
};

/// All schema violations in `doc`, ordered by path. Empty iff the document loads.
std::vector<Violation> validate_character(const nlohmann::json& doc);

/// Throws SchemaError when `doc` has violations.
Character character_from_json(const nlohmann::json& doc);

/// Throws Error{FileNotFound}, Error{MalformedJson} or SchemaError.
Character load_character(const std::filesystem::path& path);

/// Lossless serialization, including secrets. Never log this form.
nlohmann::json to_json(const Character& character);

/// Same shape as to_json with every `settings.secrets` value replaced by "[REDACTED]".
nlohmann::json to_redacted_json(const Character& character);

} // namespace agentos
