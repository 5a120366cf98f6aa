#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>

#include "graderalign/prompt_forge.hpp"

namespace graderalign {

// Decoding parameters pinned for reproducibility (temperature 0, top-p 0.01).
struct ChatParams {
    std::string model = "mixtral-8x7b-instruct";
    double temperature = 0.0;
    double top_p = 0.01;
    int max_tokens = 1024;

    void validate() const;  // throws ConfigError
};

// Stable content-addressed key for a (model, params, transcript) request.
std::string transcript_digest(const ChatTranscript& transcript, const ChatParams& params);

class Backend {
public:
    virtual ~Backend() = default;
    // Returns the assistant continuation. Throws TransportError on transport
    // failure, ProtocolError on a backend rejection, FixtureMissError when a
    // replay backend has no mapping.
    virtual std::string complete(const ChatTranscript& transcript, const ChatParams& params) = 0;
};

// Replay backend over a fixture map (request digest -> canned response).
// Identical (transcript, params) always yields identical text.
class MockBackend : public Backend {
public:
    static MockBackend load(const std::string& fixture_path);
    explicit MockBackend(std::map<std::string, std::string> responses)
        : responses_(std::move(responses)) {}

    std::string complete(const ChatTranscript& transcript, const ChatParams& params) override;

    std::size_t call_count() const { return calls_; }

private:
    std::map<std::string, std::string> responses_;
    std::size_t calls_ = 0;
};

// Writes a fixture map plus a human-readable sidecar (digest -> prompt preview).
void write_mock_fixture(const std::string& fixture_path,
                        const std::map<std::string, std::string>& responses,
                        const std::map<std::string, std::string>& previews);

// Chat-completion HTTP backend (OpenAI-style wire shape; agent maps to
// "assistant"). API key read from the environment by the caller.
class HttpBackend : public Backend {
public:
    HttpBackend(std::string base_url, std::string api_key);

    std::string complete(const ChatTranscript& transcript, const ChatParams& params) override;

private:
    std::string base_url_;
    std::string api_key_;
};

// Append-only JSON-lines response cache keyed by request digest.
// Single-writer; reads are served from the in-memory map.
class ResponseCache {
public:
    explicit ResponseCache(std::string path);

    bool contains(const std::string& key) const { return entries_.count(key) > 0; }
    std::size_t size() const { return entries_.size(); }

    std::string get(const std::string& key) const;
    void put(const std::string& key, const std::string& response);

private:
    std::string path_;
    std::map<std::string, std::string> entries_;
    mutable std::mutex mutex_;
};

// Retry wrapper: up to `max_attempts` with exponential backoff on transport
// failures; empty completions are a protocol error.
std::string complete(Backend& backend, const ChatTranscript& transcript, const ChatParams& params,
                     int max_attempts = 3, int backoff_base_ms = 1000);

// Cache-through completion: hit serves the stored text without touching the
// backend; miss completes and persists.
std::string cached_complete(ResponseCache& cache, Backend& backend,
                            const ChatTranscript& transcript, const ChatParams& params);

}  // namespace graderalign
