#include "agentos/runtime.hpp"

#include <algorithm>
#include <cstdlib>
#include <regex>

#include <spdlog/spdlog.h>

#include "agentos/action_engine.hpp"
#include "agentos/error.hpp"
#include "agentos/evaluators.hpp"
#include "agentos/logging.hpp"
#include "agentos/template.hpp"
#include "agentos/util.hpp"

namespace agentos {

using nlohmann::json;

const char* const kDefaultMessageTemplate =
    "# Agent\n"
    "You are {{agentName}}. {{bio}}\n"
    "\n"
    "# Context\n"
    "{{providers}}\n"
    "\n"
    "# Relevant memories\n"
    "{{memories}}\n"
    "\n"
    "# Available actions\n"
    "{{actions}}\n"
    "\n"
    "# Conversation in {{roomId}}\n"
    "{{recentMessages}}\n"
    "\n"
    "# Task\n"
    "Write the next reply from {{agentName}} to {{senderName}}. When an action applies, "
    "finish with a line of the form ACTION: <NAME>.\n";

// ---------------------------------------------------------------------------
// State / reply serialization

json to_json(const State& state) {
    json recent = json::array();
    for (const auto& r : state.recent_messages) recent.push_back(to_json(r, false));
    json providers = json::array();
    for (const auto& [name, text] : state.provider_outputs) {
        providers.push_back({{"name", name}, {"text", text}});
    }
    json retrieved = json::array();
    for (const auto& m : state.retrieved_memories) {
        retrieved.push_back({{"memory", to_json(m.record, false)}, {"score", m.score}});
    }
    json actions = json::array();
    for (const auto& [name, description] : state.available_actions) {
        actions.push_back({{"name", name}, {"description", description}});
    }
    return {{"agentName", state.agent_name},
            {"bio", state.bio_excerpt},
            {"recentMessages", std::move(recent)},
            {"providerOutputs", std::move(providers)},
            {"retrievedMemories", std::move(retrieved)},
            {"availableActions", std::move(actions)},
            {"extra", state.extra}};
}

json to_json(const AgentReply& reply) {
    json attachments = json::array();
    for (const auto& a : reply.attachments) attachments.push_back(to_json(a));
    return {{"text", reply.text},
            {"action", reply.action ? json(*reply.action) : json(nullptr)},
            {"attachments", std::move(attachments)}};
}

json to_json(const std::vector<AgentReply>& replies) {
    json out = json::array();
    for (const auto& r : replies) out.push_back(to_json(r));
    return out;
}

ParsedCompletion parse_completion(std::string_view completion) {
    static const std::regex action_re(R"(^\s*ACTION:\s*([A-Za-z0-9_]+)\s*$)");
    auto lines = split_lines(completion);
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();

    ParsedCompletion out;
    if (!lines.empty()) {
        std::smatch m;
        const std::string& last = lines.back();
        if (std::regex_match(last, m, action_re)) {
            std::string name = m[1].str();
            std::transform(name.begin(), name.end(), name.begin(),
                           [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
            out.action = std::move(name);
            lines.pop_back();
        } else {
            // Single-line completions may carry the marker inline: "Done. ACTION: NONE".
            static const std::regex inline_re(R"(^(.*?)\s*ACTION:\s*([A-Za-z0-9_]+)\s*$)");
            if (std::regex_match(last, m, inline_re)) {
                std::string name = m[2].str();
                std::transform(name.begin(), name.end(), name.begin(),
                               [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
                out.action = name;
                lines.back() = m[1].str();
            }
        }
    }
    out.text = std::string(trim(join(lines, "\n")));
    return out;
}

// ---------------------------------------------------------------------------
// RoomLanes

RoomLanes::Guard::Guard(RoomLanes& lanes, std::string room) : lanes_(lanes), room_(std::move(room)) {
    std::unique_lock lock(lanes_.mutex_);
    auto& lane = lanes_.lanes_[room_];
    const auto ticket = lane.next_ticket++;
    lanes_.cv_.wait(lock, [&] { return lanes_.lanes_[room_].serving == ticket; });
}

RoomLanes::Guard::~Guard() {
    {
        std::lock_guard lock(lanes_.mutex_);
        ++lanes_.lanes_[room_].serving;
    }
    lanes_.cv_.notify_all();
}

// ---------------------------------------------------------------------------
// Runtime

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

} // namespace

Runtime::Runtime(RuntimeConfig config, std::shared_ptr<ModelRegistry> models,
                 std::shared_ptr<Clock> clock)
    : config_(std::move(config)), models_(std::move(models)), clock_(std::move(clock)) {
    if (!models_) models_ = std::make_shared<ModelRegistry>();
    if (!clock_) clock_ = std::make_shared<SystemClock>();

    if (auto violations = validate_character(to_json(config_.character)); !violations.empty()) {
        throw Error(ErrorCode::InvalidCharacter,
                    violations.front().path + ": " + violations.front().message);
    }
    for (const auto& [key, value] : config_.character.settings.secrets) register_secret(value);
    for (const auto& [key, value] : config_.settings) {
        const auto k = upper(key);
        if (k.find("KEY") != std::string::npos || k.find("SECRET") != std::string::npos) register_secret(value);
    }
    install_log_redaction();

    if (config_.model_provider_id.empty()) config_.model_provider_id = config_.character.model_provider_id;
    if (!models_->contains(config_.model_provider_id)) {
        throw Error(ErrorCode::UnknownModelProvider, config_.model_provider_id);
    }
    if (config_.conversation_length == 0) {
        throw Error(ErrorCode::InvalidArgument, "conversation_length must be at least 1");
    }
    if (config_.agent_id.empty()) {
        config_.agent_id = "agent-" + to_hex(stable_hash64(config_.character.name)).substr(0, 12);
    }

    std::filesystem::path memory_file;
    if (auto path = get_setting("MEMORY_FILE")) memory_file = *path;
    memory_ = open_adapter(config_.database_adapter_id, memory_file);

    for (auto& action : builtin_actions()) add_action(std::move(action), true);
    ingest_knowledge();
}

Runtime::~Runtime() {
    try {
        stop_clients();
        stop_services();
        memory_->flush();
    } catch (const std::exception& e) {
        spdlog::error("runtime shutdown: {}", e.what());
    }
}

void Runtime::ingest_knowledge() {
    const std::string room(kKnowledgeRoom);
    const auto known = memory_->room_records(room, memory_->count() + 1, MemoryKind::Fact);
    for (const auto& fact : config_.character.knowledge) {
        if (trim(fact).empty()) continue;
        const bool present = std::any_of(known.begin(), known.end(),
                                         [&](const MemoryRecord& r) { return r.content.text == fact; });
        if (present) continue;
        MemoryRecord r;
        r.id = next_id("fact");
        r.agent_id = config_.agent_id;
        r.user_id = config_.agent_id;
        r.room_id = room;
        r.kind = MemoryKind::Fact;
        r.content.text = fact;
        r.created_at = clock_->now();
        memory_->store(std::move(r));
    }
}

void Runtime::ensure_mutable() const {
    if (frozen()) throw Error(ErrorCode::RuntimeFrozen, "registries are frozen");
}

void Runtime::add_action(ActionDef action, bool builtin) {
    ensure_mutable();
    if (trim(action.name).empty()) throw Error(ErrorCode::InvalidArgument, "action name must not be empty");
    if (!action.validate) action.validate = [](Runtime&, const MemoryRecord&) { return true; };
    if (!action.handler) {
        throw Error(ErrorCode::InvalidArgument, "action " + action.name + " has no handler");
    }

    std::vector<std::string> keys{upper(action.name)};
    for (const auto& s : action.similes) keys.push_back(upper(s));
    for (std::size_t i = 0; i < keys.size(); ++i) {
        if (registry_.action_keys.contains(keys[i]) ||
            std::find(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(i), keys[i]) !=
                keys.begin() + static_cast<std::ptrdiff_t>(i)) {
            throw Error(ErrorCode::DuplicateActionName, keys[i]);
        }
    }

    std::string doc = action.name;
    for (const auto& s : action.similes) doc += " " + s;
    doc += " " + action.description;

    const std::size_t index = registry_.actions.size();
    for (auto& k : keys) registry_.action_keys.emplace(std::move(k), index);
    registry_.actions.push_back({std::move(action), embed(doc), builtin});
}

void Runtime::register_action(ActionDef action) {
    add_action(std::move(action), false);
}

void Runtime::register_provider(ProviderDef provider) {
    ensure_mutable();
    if (trim(provider.name).empty()) throw Error(ErrorCode::InvalidArgument, "provider name must not be empty");
    if (!provider.get) throw Error(ErrorCode::InvalidArgument, "provider " + provider.name + " has no get");
    for (const auto& p : registry_.providers) {
        if (p.name == provider.name) throw Error(ErrorCode::DuplicateProviderName, provider.name);
    }
    registry_.providers.push_back(std::move(provider));
}

void Runtime::register_evaluator(EvaluatorDef evaluator) {
    ensure_mutable();
    if (trim(evaluator.name).empty()) throw Error(ErrorCode::InvalidArgument, "evaluator name must not be empty");
    if (!evaluator.run) throw Error(ErrorCode::InvalidArgument, "evaluator " + evaluator.name + " has no run");
    for (const auto& e : registry_.evaluators) {
        if (e.name == evaluator.name) throw Error(ErrorCode::DuplicateEvaluatorName, evaluator.name);
    }
    if (!evaluator.should_run) evaluator.should_run = [](const MemoryRecord&, const State&) { return true; };
    registry_.evaluators.push_back(std::move(evaluator));
}

void Runtime::register_service(ServiceDef service) {
    ensure_mutable();
    if (trim(service.name).empty()) throw Error(ErrorCode::InvalidArgument, "service name must not be empty");
    for (const auto& s : registry_.services) {
        if (s.name == service.name) throw Error(ErrorCode::DuplicateComponentName, "service " + service.name);
    }
    registry_.services.push_back(std::move(service));
}

void Runtime::register_client(ClientDef client) {
    ensure_mutable();
    if (trim(client.name).empty()) throw Error(ErrorCode::InvalidArgument, "client name must not be empty");
    for (const auto& c : registry_.clients) {
        if (c.name == client.name) throw Error(ErrorCode::DuplicateComponentName, "client " + client.name);
    }
    registry_.clients.push_back(std::move(client));
}

const ActionDef* Runtime::resolve_action(std::string_view name) const {
    auto it = registry_.action_keys.find(upper(trim(name)));
    if (it == registry_.action_keys.end()) return nullptr;
    return &registry_.actions[it->second].def;
}

const Embedding* Runtime::action_embedding(std::string_view name) const {
    auto it = registry_.action_keys.find(upper(trim(name)));
    if (it == registry_.action_keys.end()) return nullptr;
    return &registry_.actions[it->second].embedding;
}

bool Runtime::is_builtin_action(std::string_view name) const {
    auto it = registry_.action_keys.find(upper(trim(name)));
    return it != registry_.action_keys.end() && registry_.actions[it->second].builtin;
}

std::vector<const ActionDef*> Runtime::actions() const {
    std::vector<const ActionDef*> out;
    out.reserve(registry_.actions.size());
    for (const auto& a : registry_.actions) out.push_back(&a.def);
    return out;
}

std::optional<std::string> Runtime::get_setting(const std::string& key) const {
    if (auto it = config_.settings.find(key); it != config_.settings.end()) return it->second;
    if (const char* env = std::getenv(key.c_str()); env != nullptr) return std::string(env);
    const auto& secrets = config_.character.settings.secrets;
    if (auto it = secrets.find(key); it != secrets.end()) return it->second;
    return std::nullopt;
}

std::string Runtime::next_id(std::string_view prefix) {
    // Skips ids already present so a reopened file store keeps working.
    for (;;) {
        const auto n = id_counter_.fetch_add(1) + 1;
        const auto h = stable_hash64(config_.agent_id + ":" + std::to_string(n));
        std::string id = std::string(prefix) + "-" + to_hex(h);
        if (!memory_ || !memory_->get(id)) return id;
    }
}

MemoryRecord Runtime::remember(const std::string& room_id, Content content, MemoryKind kind) {
    MemoryRecord r;
    r.id = next_id(kind == MemoryKind::Message ? "msg" : "mem");
    r.agent_id = config_.agent_id;
    r.user_id = config_.agent_id;
    r.room_id = room_id;
    r.kind = kind;
    r.content = std::move(content);
    r.created_at = clock_->now();
    memory_->store(r);
    return *memory_->get(r.id);
}

State Runtime::compose_state(const MemoryRecord& incoming) const {
    State state;
    state.agent_name = config_.character.name;
    state.bio_excerpt = join(config_.character.bio, " ");

    state.recent_messages = memory_->recent(incoming.room_id, config_.conversation_length);
    const bool persisted = std::any_of(state.recent_messages.begin(), state.recent_messages.end(),
                                       [&](const MemoryRecord& r) { return r.id == incoming.id; });
    if (!persisted && !memory_->get(incoming.id)) {
        state.recent_messages.push_back(incoming);
        if (state.recent_messages.size() > config_.conversation_length) {
            state.recent_messages.erase(state.recent_messages.begin());
        }
    }

    for (const auto& a : registry_.actions) {
        state.available_actions.emplace_back(a.def.name, a.def.description);
    }

    const Embedding query = incoming.embedding.empty() ? embed(incoming.content.text) : incoming.embedding;
    MemoryFilter filter;
    filter.exclude_id = incoming.id;
    state.retrieved_memories = memory_->search_similar(query, config_.retrieval_k, 0.0, filter);

    const auto& c = config_.character;
    state.extra["agentId"] = config_.agent_id;
    state.extra["roomId"] = incoming.room_id;
    state.extra["senderName"] = incoming.user_id;
    state.extra["message"] = incoming.content.text;
    state.extra["lore"] = join(c.lore, "\n");
    state.extra["topics"] = join(c.topics, ", ");
    state.extra["adjectives"] = join(c.adjectives, ", ");
    state.extra["styleAll"] = join(c.style.all, "\n");
    state.extra["styleChat"] = join(c.style.chat, "\n");
    state.extra["stylePost"] = join(c.style.post, "\n");

    for (const auto& p : registry_.providers) {
        std::string text;
        try {
            text = p.get(*this, incoming, state);
        } catch (const std::exception& e) {
            spdlog::warn("provider {} failed: {}", p.name, e.what());
            text.clear();
        } catch (...) {
            spdlog::warn("provider {} failed", p.name);
            text.clear();
        }
        state.provider_outputs.emplace_back(p.name, std::move(text));
    }
    return state;
}

std::string Runtime::generate(const std::string& prompt) {
    CompletionRequest req;
    req.prompt = prompt;
    if (auto v = get_setting("MAX_TOKENS")) req.max_tokens = std::stoi(*v);
    if (auto v = get_setting("TEMPERATURE")) req.temperature = std::stod(*v);
    return models_->complete(config_.model_provider_id, req);
}

std::vector<AgentReply> Runtime::fallback_reply(const MemoryRecord& incoming) {
    AgentReply reply;
    reply.text = get_setting("FALLBACK_TEXT").value_or(std::string(kDefaultFallbackText));
    Content c;
    c.text = reply.text;
    remember(incoming.room_id, std::move(c));
    return {reply};
}

std::vector<AgentReply> Runtime::process_message(MemoryRecord incoming) {
    if (trim(incoming.content.text).empty()) {
        throw Error(ErrorCode::InvalidArgument, "message text must not be empty");
    }
    if (incoming.user_id.empty() || incoming.room_id.empty()) {
        throw Error(ErrorCode::InvalidArgument, "message needs user and room ids");
    }

    RoomLanes::Guard lane(lanes_, incoming.room_id);

    // (1) persist incoming
    if (incoming.id.empty()) incoming.id = next_id("msg");
    incoming.agent_id = config_.agent_id;
    incoming.kind = MemoryKind::Message;
    if (incoming.created_at == 0) incoming.created_at = clock_->now();
    memory_->store(incoming);
    incoming = *memory_->get(incoming.id);

    // (2) compose state, (3) render
    State state = compose_state(incoming);
    const std::string prompt = render_template(config_.message_template, state);

    // (4) model completion
    std::string completion;
    try {
        completion = generate(prompt);
    } catch (const std::exception& e) {
        spdlog::warn("model provider {} failed: {}", config_.model_provider_id, e.what());
        return fallback_reply(incoming);
    }

    // (5) parse, (6) reconcile intent, (7) execute
    auto parsed = parse_completion(completion);
    state.extra["replyText"] = parsed.text;
    state.extra["prompt"] = prompt;
    const auto candidates = recognize_intent(*this, incoming.content.text, parsed.action, state);
    ActionResult result = select_and_execute(*this, candidates, incoming, state);

    std::vector<AgentReply> replies;
    if (result.action != "IGNORE") {
        AgentReply primary{parsed.text, result.action, {}};
        if (!result.extension.empty()) {
            primary.text += primary.text.empty() ? result.extension : " " + result.extension;
        }
        std::vector<AgentReply> extra;
        if (!result.success) {
            extra.push_back({"Action " + result.action + " failed: " + result.diagnostic, result.action, {}});
        } else {
            for (auto& c : result.replies) {
                extra.push_back({std::move(c.text), result.action, std::move(c.attachments)});
            }
        }
        if (!primary.text.empty() || extra.empty()) replies.push_back(std::move(primary));
        for (auto& r : extra) replies.push_back(std::move(r));
    }

    // (8) persist replies
    for (const auto& r : replies) {
        remember(incoming.room_id, Content{r.text, r.action, r.attachments});
    }

    // (9) evaluators over the updated transcript
    run_evaluators(*this, incoming, state);
    return replies;
}

void Runtime::start_services() {
    std::lock_guard lock(lifecycle_mutex_);
    for (std::size_t i = 0; i < registry_.services.size(); ++i) {
        const bool running = std::any_of(running_services_.begin(), running_services_.end(),
                                         [i](const auto& s) { return s.first == i; });
        if (running) continue;
        const auto& s = registry_.services[i];
        running_services_.emplace_back(i, s.start ? s.start(*this) : ComponentHandle{});
    }
}

void Runtime::stop_services() {
    std::lock_guard lock(lifecycle_mutex_);
    while (!running_services_.empty()) {
        auto [index, handle] = std::move(running_services_.back());
        running_services_.pop_back();
        const auto& s = registry_.services[index];
        if (s.stop) s.stop(handle);
    }
}

void Runtime::start_clients() {
    std::lock_guard lock(lifecycle_mutex_);
    const auto& wanted = config_.character.clients;
    for (std::size_t i = 0; i < registry_.clients.size(); ++i) {
        const auto& c = registry_.clients[i];
        if (std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) continue;
        const bool running = std::any_of(running_clients_.begin(), running_clients_.end(),
                                         [i](const auto& r) { return r.first == i; });
        if (running) continue;
        running_clients_.emplace_back(i, c.start ? c.start(*this) : ComponentHandle{});
    }
}

void Runtime::stop_clients() {
    std::lock_guard lock(lifecycle_mutex_);
    while (!running_clients_.empty()) {
        auto [index, handle] = std::move(running_clients_.back());
        running_clients_.pop_back();
        const auto& c = registry_.clients[index];
        if (c.stop) c.stop(handle);
    }
}

std::vector<std::string> Runtime::running_clients() const {
    std::lock_guard lock(lifecycle_mutex_);
    std::vector<std::string> out;
    for (const auto& [index, handle] : running_clients_) out.push_back(registry_.clients[index].name);
    return out;
}

std::string Runtime::registry_digest() const {
    json doc;
    json actions = json::array();
    for (const auto& a : registry_.actions) {
        actions.push_back({{"name", a.def.name}, {"similes", a.def.similes}, {"description", a.def.description}});
    }
    doc["actions"] = std::move(actions);
    json providers = json::array();
    for (const auto& p : registry_.providers) providers.push_back(p.name);
    doc["providers"] = std::move(providers);
    json evaluators = json::array();
    for (const auto& e : registry_.evaluators) evaluators.push_back(e.name);
    doc["evaluators"] = std::move(evaluators);
    json services = json::array();
    for (const auto& s : registry_.services) services.push_back(s.name);
    doc["services"] = std::move(services);
    json clients = json::array();
    for (const auto& c : registry_.clients) clients.push_back(c.name);
    doc["clients"] = std::move(clients);
    json plugins = json::array();
    for (const auto& p : registry_.plugins) plugins.push_back(p.name);
    doc["plugins"] = std::move(plugins);
    return sha256_hex(doc.dump());
}

std::string Runtime::state_digest() const {
    return sha256_hex(registry_digest() + ":" + memory_->digest());
}

} // namespace agentos
