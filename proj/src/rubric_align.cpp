#include "graderalign/rubric_align.hpp"

#include <algorithm>
#include <cctype>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "graderalign/errors.hpp"

#include <httplib.h>

namespace graderalign {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// "- ", "* ", or "<digits>." / "<digits>)" followed by whitespace.
bool is_bullet_line(const std::string& line, std::size_t* content_start) {
    if (line.size() >= 2 && (line[0] == '-' || line[0] == '*') && line[1] == ' ') {
        *content_start = 2;
        return true;
    }
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        std::size_t j = i + 1;
        if (j < line.size() && line[j] == ' ') {
            *content_start = j + 1;
            return true;
        }
    }
    return false;
}

std::vector<std::string> split_segments(const std::string& raw) {
    static const std::string kSep = "|||";
    if (raw.find(kSep) != std::string::npos) {
        std::vector<std::string> segs;
        std::size_t pos = 0;
        for (;;) {
            auto next = raw.find(kSep, pos);
            if (next == std::string::npos) {
                segs.push_back(raw.substr(pos));
                break;
            }
            segs.push_back(raw.substr(pos, next - pos));
            pos = next + kSep.size();
        }
        return segs;
    }
    // Bullet/numbered-line fallback.
    std::vector<std::string> bullets;
    std::istringstream lines(raw);
    std::string line;
    while (std::getline(lines, line)) {
        const auto t = trim(line);
        std::size_t start = 0;
        if (is_bullet_line(t, &start)) bullets.push_back(t.substr(start));
    }
    if (!bullets.empty()) return bullets;
    return {raw};
}

std::set<std::string> word_set(const std::string& s) {
    std::set<std::string> words;
    std::string cur;
    for (unsigned char c : s) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            words.insert(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) words.insert(cur);
    return words;
}

}  // namespace

std::vector<Rule> parse_rules(const std::string& raw) {
    std::vector<Rule> rules;
    for (const auto& seg : split_segments(raw)) {
        const auto text = trim(seg);
        if (text.empty()) continue;
        rules.push_back({text, static_cast<int>(rules.size())});
    }
    return rules;
}

double JaccardScorer::score(const std::string& a, const std::string& b) {
    const auto wa = word_set(a);
    const auto wb = word_set(b);
    if (wa.empty() && wb.empty()) return 1.0;
    if (wa.empty() || wb.empty()) return 0.0;
    std::size_t inter = 0;
    for (const auto& w : wa) inter += wb.count(w);
    const std::size_t uni = wa.size() + wb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

HttpSimilarityScorer::HttpSimilarityScorer(std::string base_url, std::string api_key)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)) {}

double HttpSimilarityScorer::score(const std::string& a, const std::string& b) {
    nlohmann::json body;
    body["pairs"] = nlohmann::json::array({nlohmann::json::array({a, b})});

    httplib::Client client(base_url_);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
    auto res = client.Post("/score", headers, body.dump(), "application/json");
    if (!res) throw TransportError("no response from similarity scorer at " + base_url_);
    if (res->status != 200)
        throw ProtocolError("similarity scorer rejected request (" +
                            std::to_string(res->status) + ")");
    try {
        auto doc = nlohmann::json::parse(res->body);
        double s = doc.at("scores").at(0).get<double>();
        return std::clamp(s, 0.0, 1.0);
    } catch (const nlohmann::json::exception& e) {
        throw ProtocolError(std::string("malformed scorer payload: ") + e.what());
    }
}

void AlignmentConfig::validate() const {
    if (!(tau_precision > 0 && tau_precision <= 1))
        throw ConfigError("tau_precision must be in (0,1]");
    if (!(tau_recall > 0 && tau_recall <= 1)) throw ConfigError("tau_recall must be in (0,1]");
}

namespace {

// Arg-max partner and score of `rule` over `others`; ties keep the lowest index.
MatchEvidence best_match(const Rule& rule, const std::vector<Rule>& others,
                         SimilarityScorer& scorer) {
    MatchEvidence ev;
    ev.rule_index = rule.index;
    for (const auto& other : others) {
        double s;
        try {
            s = scorer.score(rule.text, other.text);
        } catch (const std::exception& e) {
            throw ProtocolError("scorer failed on pair (rule " + std::to_string(rule.index) +
                                ", rule " + std::to_string(other.index) + "): " + e.what());
        }
        if (s > ev.score || ev.partner_index < 0) {
            ev.score = s;
            ev.partner_index = other.index;
        }
    }
    return ev;
}

}  // namespace

double precision(const std::vector<Rule>& gen, const std::vector<Rule>& human,
                 SimilarityScorer& scorer, const AlignmentConfig& cfg) {
    cfg.validate();
    if (gen.empty()) throw std::invalid_argument("precision: empty generated rule list");
    int correct = 0;
    for (const auto& g : gen)
        if (best_match(g, human, scorer).score >= cfg.tau_precision) ++correct;
    return static_cast<double>(correct) / static_cast<double>(gen.size());
}

double recall(const std::vector<Rule>& gen, const std::vector<Rule>& human,
              SimilarityScorer& scorer, const AlignmentConfig& cfg) {
    cfg.validate();
    if (human.empty()) throw ConfigError("recall: item has no human analytic rubric");
    if (gen.empty()) return 0.0;
    int recalled = 0;
    for (const auto& h : human)
        if (best_match(h, gen, scorer).score >= cfg.tau_recall) ++recalled;
    return static_cast<double>(recalled) / static_cast<double>(human.size());
}

double f1(double p, double r) {
    if (p < 0 || p > 1 || r < 0 || r > 1) throw std::invalid_argument("f1: inputs must be in [0,1]");
    if (p + r == 0) return 0.0;
    return 2.0 * p * r / (p + r);
}

AlignmentReport align(const GeneratedRubric& generated, const AssessmentItem& item,
                      SimilarityScorer& scorer, const AlignmentConfig& cfg) {
    cfg.validate();
    if (item.analytic_rubric.empty())
        throw ConfigError("align: item '" + item.id + "' has no human analytic rubric");

    std::vector<Rule> human;
    for (const auto& text : item.analytic_rubric)
        human.push_back({text, static_cast<int>(human.size())});

    AlignmentReport report;
    report.rule_count = static_cast<int>(generated.rules.size());

    for (const auto& g : generated.rules) report.matches.push_back(best_match(g, human, scorer));
    for (const auto& h : human) report.recalled.push_back(best_match(h, generated.rules, scorer));

    if (!generated.rules.empty()) {
        int correct = 0;
        for (const auto& ev : report.matches)
            if (ev.score >= cfg.tau_precision) ++correct;
        report.precision = static_cast<double>(correct) / generated.rules.size();

        int recalled_n = 0;
        for (const auto& ev : report.recalled)
            if (ev.score >= cfg.tau_recall) ++recalled_n;
        report.recall = static_cast<double>(recalled_n) / human.size();
    }
    report.f1 = f1(report.precision, report.recall);
    return report;
}

}  // namespace graderalign
