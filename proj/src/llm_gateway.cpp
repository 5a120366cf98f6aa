#include "graderalign/llm_gateway.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <thread>

#include "graderalign/digest.hpp"
#include "graderalign/errors.hpp"

// httplib pulled in only here to keep the header light.
#include <httplib.h>

namespace graderalign {

using nlohmann::json;

namespace {

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string wire_role(Role role) {
    switch (role) {
        case Role::System: return "system";
        case Role::User: return "user";
        case Role::Agent: return "assistant";
    }
    return "?";
}

}  // namespace

void ChatParams::validate() const {
    if (model.empty()) throw ConfigError("ChatParams: empty model name");
    if (temperature < 0) throw ConfigError("ChatParams: temperature must be >= 0");
    if (!(top_p > 0 && top_p <= 1)) throw ConfigError("ChatParams: top_p must be in (0,1]");
    if (max_tokens <= 0) throw ConfigError("ChatParams: max_tokens must be positive");
}

std::string transcript_digest(const ChatTranscript& transcript, const ChatParams& params) {
    // Length-prefixed canonical serialization; unambiguous for any content.
    std::string canon;
    canon += params.model + "\n";
    canon += format_real(params.temperature) + "\n";
    canon += format_real(params.top_p) + "\n";
    canon += std::to_string(params.max_tokens) + "\n";
    for (const auto& m : transcript.messages) {
        canon += role_name(m.role);
        canon += "\x1f";
        canon += std::to_string(m.content.size());
        canon += "\x1f";
        canon += m.content;
        canon += "\x1e";
    }
    return sha256_hex(canon);
}

MockBackend MockBackend::load(const std::string& fixture_path) {
    std::ifstream in(fixture_path);
    if (!in) throw ConfigError("mock fixture not found: " + fixture_path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("mock fixture " + fixture_path + ": " + e.what());
    }
    std::map<std::string, std::string> responses;
    for (const auto& [key, value] : doc.at("responses").items())
        responses[key] = value.get<std::string>();
    return MockBackend(std::move(responses));
}

std::string MockBackend::complete(const ChatTranscript& transcript, const ChatParams& params) {
    ++calls_;
    const auto key = transcript_digest(transcript, params);
    auto it = responses_.find(key);
    if (it == responses_.end())
        throw FixtureMissError("fixture miss for request digest " + key);
    return it->second;
}

void write_mock_fixture(const std::string& fixture_path,
                        const std::map<std::string, std::string>& responses,
                        const std::map<std::string, std::string>& previews) {
    json doc;
    doc["version"] = 1;
    doc["responses"] = json::object();
    for (const auto& [k, v] : responses) doc["responses"][k] = v;
    std::ofstream out(fixture_path);
    if (!out) throw ConfigError("cannot write mock fixture: " + fixture_path);
    out << doc.dump(2) << "\n";

    std::ofstream side(fixture_path + ".preview.txt");
    for (const auto& [k, p] : previews) side << k << "  " << p << "\n";
}

HttpBackend::HttpBackend(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {}

std::string HttpBackend::complete(const ChatTranscript& transcript, const ChatParams& params) {
    json body;
    body["model"] = params.model;
    body["temperature"] = params.temperature;
    body["top_p"] = params.top_p;
    body["max_tokens"] = params.max_tokens;
    body["messages"] = json::array();
    for (const auto& m : transcript.messages)
        body["messages"].push_back({{"role", wire_role(m.role)}, {"content", m.content}});

    httplib::Client client(base_url_);
    client.set_read_timeout(120, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto res = client.Post("/v1/chat/completions", headers, body.dump(), "application/json");
    if (!res) throw TransportError("no response from " + base_url_);
    if (res->status >= 500) throw TransportError("server error " + std::to_string(res->status));
    if (res->status != 200)
        throw ProtocolError("backend rejected request (" + std::to_string(res->status) +
                            "): " + res->body);
    try {
        auto doc = json::parse(res->body);
        auto text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
        if (text.empty()) throw ProtocolError("backend returned an empty completion");
        return text;
    } catch (const json::exception& e) {
        throw ProtocolError(std::string("malformed completion payload: ") + e.what());
    }
}

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;  // fresh cache
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            auto rec = json::parse(line);
            entries_[rec.at("key").get<std::string>()] = rec.at("response").get<std::string>();
        } catch (const json::exception& e) {
            throw IntegrityError("cache " + path_ + " line " + std::to_string(lineno) + ": " +
                                 e.what());
        }
    }
}

std::string ResponseCache::get(const std::string& key) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(key);
    if (it == entries_.end()) throw IntegrityError("cache miss treated as get: " + key);
    return it->second;
}

void ResponseCache::put(const std::string& key, const std::string& response) {
    std::lock_guard lock(mutex_);
    if (entries_.count(key)) return;
    entries_[key] = response;
    std::ofstream out(path_, std::ios::app);
    if (!out) throw IntegrityError("cannot append to cache: " + path_);
    json rec;
    rec["key"] = key;
    rec["response"] = response;
    rec["created_at"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    out << rec.dump() << "\n";
}

std::string complete(Backend& backend, const ChatTranscript& transcript, const ChatParams& params,
                     int max_attempts, int backoff_base_ms) {
    transcript.validate();
    params.validate();
    int attempt = 0;
    for (;;) {
        try {
            auto text = backend.complete(transcript, params);
            if (text.empty()) throw ProtocolError("empty completion");
            return text;
        } catch (const TransportError&) {
            if (++attempt >= max_attempts) throw;
            std::this_thread::sleep_for(
                std::chrono::milliseconds(backoff_base_ms << (attempt - 1)));
        }
    }
}

std::string cached_complete(ResponseCache& cache, Backend& backend,
                            const ChatTranscript& transcript, const ChatParams& params) {
    const auto key = transcript_digest(transcript, params);
    if (cache.contains(key)) return cache.get(key);
    auto text = complete(backend, transcript, params);
    cache.put(key, text);
    return text;
}

}  // namespace graderalign
