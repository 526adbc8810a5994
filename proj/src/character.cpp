#include "agentos/character.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <string_view>

namespace agentos {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 8> kStringListKeys = {
    "clients", "bio", "lore", "knowledge", "postExamples", "topics", "adjectives", "plugins",
};

constexpr std::array<std::string_view, 13> kKnownKeys = {
    "name",   "modelProvider", "clients",    "bio",   "lore",    "knowledge",      "messageExamples",
    "postExamples", "topics",  "adjectives", "style", "plugins", "settings",
};

std::string describe(const json& v) {
    return std::string(v.type_name());
}

void check_string_list(const json& v, const std::string& path, std::vector<Violation>& out) {
    if (!v.is_array()) {
        out.push_back({path, "expected array of strings, got " + describe(v)});
        return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_string()) {
            out.push_back({path + "[" + std::to_string(i) + "]",
                           "expected string, got " + describe(v[i])});
        }
    }
}

void check_required_string(const json& doc, const std::string& key, std::vector<Violation>& out) {
    auto it = doc.find(key);
    if (it == doc.end()) {
        out.push_back({key, "required field is missing"});
    } else if (!it->is_string()) {
        out.push_back({key, "expected string, got " + describe(*it)});
    } else if (it->get_ref<const std::string&>().empty()) {
        out.push_back({key, "must not be empty"});
    }
}

void check_message_examples(const json& v, std::vector<Violation>& out) {
    const std::string base = "messageExamples";
    if (!v.is_array()) {
        out.push_back({base, "expected array of dialogues, got " + describe(v)});
        return;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto dpath = base + "[" + std::to_string(i) + "]";
        const auto& dialogue = v[i];
        if (!dialogue.is_array()) {
            out.push_back({dpath, "expected array of messages, got " + describe(dialogue)});
            continue;
        }
        for (std::size_t j = 0; j < dialogue.size(); ++j) {
            const auto mpath = dpath + "[" + std::to_string(j) + "]";
            const auto& msg = dialogue[j];
            if (!msg.is_object()) {
                out.push_back({mpath, "expected object, got " + describe(msg)});
                continue;
            }
            auto user = msg.find("user");
            if (user == msg.end() || !user->is_string()) {
                out.push_back({mpath + ".user", "expected string"});
            }
            auto content = msg.find("content");
            if (content == msg.end() || !content->is_object()) {
                out.push_back({mpath + ".content", "expected object with a text field"});
                continue;
            }
            auto text = content->find("text");
            if (text == content->end() || !text->is_string()) {
                out.push_back({mpath + ".content.text", "expected string"});
            }
        }
    }
}

void check_style(const json& v, std::vector<Violation>& out) {
    if (!v.is_object()) {
        out.push_back({"style", "expected object, got " + describe(v)});
        return;
    }
    for (const char* key : {"all", "chat", "post"}) {
        if (auto it = v.find(key); it != v.end()) {
            check_string_list(*it, std::string("style.") + key, out);
        }
    }
}

void check_settings(const json& v, std::vector<Violation>& out) {
    if (!v.is_object()) {
        out.push_back({"settings", "expected object, got " + describe(v)});
        return;
    }
    if (auto it = v.find("secrets"); it != v.end()) {
        if (!it->is_object()) {
            out.push_back({"settings.secrets", "expected object of strings, got " + describe(*it)});
        } else {
            for (const auto& [key, value] : it->items()) {
                if (!value.is_string()) {
                    out.push_back({"settings.secrets." + key, "expected string, got " + describe(value)});
                }
            }
        }
    }
    if (auto it = v.find("voice"); it != v.end() && !it->is_string()) {
        out.push_back({"settings.voice", "expected string, got " + describe(*it)});
    }
}

std::vector<std::string> string_list(const json& doc, std::string_view key) {
    auto it = doc.find(key);
    if (it == doc.end()) return {};
    return it->get<std::vector<std::string>>();
}

json string_list_json(const std::vector<std::string>& v) {
    return json(v);
}

} // namespace

SchemaError::SchemaError(std::vector<Violation> violations)
    : Error(ErrorCode::SchemaViolation,
            violations.empty() ? std::string("invalid character")
                               : violations.front().path + ": " + violations.front().message +
                                     (violations.size() > 1
                                          ? " (+" + std::to_string(violations.size() - 1) + " more)"
                                          : std::string())),
      violations_(std::move(violations)) {}

std::vector<Violation> validate_character(const json& doc) {
    std::vector<Violation> out;
    if (!doc.is_object()) {
        out.push_back({"", "expected a JSON object, got " + describe(doc)});
        return out;
    }
    check_required_string(doc, "name", out);
    check_required_string(doc, "modelProvider", out);
    for (auto key : kStringListKeys) {
        if (auto it = doc.find(key); it != doc.end()) {
            check_string_list(*it, std::string(key), out);
        }
    }
    if (auto it = doc.find("messageExamples"); it != doc.end()) check_message_examples(*it, out);
    if (auto it = doc.find("style"); it != doc.end()) check_style(*it, out);
    if (auto it = doc.find("settings"); it != doc.end()) check_settings(*it, out);

    std::stable_sort(out.begin(), out.end(),
                     [](const Violation& a, const Violation& b) { return a.path < b.path; });
    return out;
}

Character character_from_json(const json& doc) {
    if (auto violations = validate_character(doc); !violations.empty()) {
        throw SchemaError(std::move(violations));
    }
    Character c;
    c.name = doc.at("name").get<std::string>();
    c.model_provider_id = doc.at("modelProvider").get<std::string>();
    c.clients = string_list(doc, "clients");
    c.bio = string_list(doc, "bio");
    c.lore = string_list(doc, "lore");
    c.knowledge = string_list(doc, "knowledge");
    c.post_examples = string_list(doc, "postExamples");
    c.topics = string_list(doc, "topics");
    c.adjectives = string_list(doc, "adjectives");
    c.plugins = string_list(doc, "plugins");

    if (auto it = doc.find("messageExamples"); it != doc.end()) {
        for (const auto& dialogue : *it) {
            std::vector<MessageExample> turns;
            for (const auto& msg : dialogue) {
                turns.push_back({msg.at("user").get<std::string>(),
                                 msg.at("content").at("text").get<std::string>()});
            }
            c.message_examples.push_back(std::move(turns));
        }
    }
    if (auto it = doc.find("style"); it != doc.end()) {
        c.style.all = string_list(*it, "all");
        c.style.chat = string_list(*it, "chat");
        c.style.post = string_list(*it, "post");
    }
    if (auto it = doc.find("settings"); it != doc.end()) {
        if (auto s = it->find("secrets"); s != it->end()) {
            c.settings.secrets = s->get<std::map<std::string, std::string>>();
        }
        if (auto v = it->find("voice"); v != it->end()) {
            c.settings.voice = v->get<std::string>();
        }
    }
    for (const auto& [key, value] : doc.items()) {
        if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end()) {
            c.extra[key] = value;
        }
    }
    return c;
}

Character load_character(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::FileNotFound, path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::MalformedJson, path.string() + ": " + e.what());
    }
    return character_from_json(doc);
}

json to_json(const Character& c) {
    json doc = c.extra.is_object() ? c.extra : json::object();
    doc["name"] = c.name;
    doc["modelProvider"] = c.model_provider_id;
    doc["clients"] = string_list_json(c.clients);
    doc["bio"] = string_list_json(c.bio);
    doc["lore"] = string_list_json(c.lore);
    doc["knowledge"] = string_list_json(c.knowledge);
    doc["postExamples"] = string_list_json(c.post_examples);
    doc["topics"] = string_list_json(c.topics);
    doc["adjectives"] = string_list_json(c.adjectives);
    doc["plugins"] = string_list_json(c.plugins);

    json examples = json::array();
    for (const auto& dialogue : c.message_examples) {
        json turns = json::array();
        for (const auto& m : dialogue) {
            turns.push_back({{"user", m.user}, {"content", {{"text", m.text}}}});
        }
        examples.push_back(std::move(turns));
    }
    doc["messageExamples"] = std::move(examples);
    doc["style"] = {{"all", c.style.all}, {"chat", c.style.chat}, {"post", c.style.post}};

    json settings = {{"secrets", json(c.settings.secrets)}};
    if (c.settings.voice) settings["voice"] = *c.settings.voice;
    doc["settings"] = std::move(settings);
    return doc;
}

json to_redacted_json(const Character& c) {
    json doc = to_json(c);
    for (auto& [key, value] : doc["settings"]["secrets"].items()) {
        value = "[REDACTED]";
    }
    return doc;
}

} // namespace agentos
