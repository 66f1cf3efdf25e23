#include "refill/collection.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "refill/errors.hpp"

namespace refill {

namespace {

using json = nlohmann::json;

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\v' || c == '\f'; }

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_ws(line[i])) ++i;
    std::size_t start = i;
    while (i < line.size() && !is_ws(line[i])) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<int> to_int(const std::string& s) {
  int value = 0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::optional<double> to_double(const std::string& s) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

/// Calls fn(line_no, line) for every non-blank, non-comment line; handles
/// CRLF input.
template <typename Fn>
void for_each_line(const std::string& text, Fn&& fn) {
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    bool blank = true;
    for (char c : line) {
      if (!is_ws(c)) { blank = false; break; }
    }
    if (!blank && line[line.find_first_not_of(" \t\v\f")] != '#') fn(line_no, line);
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
}

}  // namespace

// ---- JudgmentSet ----

bool JudgmentSet::contains(const std::string& query_id, const std::string& doc_id) const {
  return labels.find({query_id, doc_id}) != labels.end();
}

std::optional<int> JudgmentSet::grade(const std::string& query_id,
                                      const std::string& doc_id) const {
  auto it = labels.find({query_id, doc_id});
  if (it == labels.end()) return std::nullopt;
  return it->second.grade;
}

std::set<std::string> JudgmentSet::query_ids() const {
  std::set<std::string> out;
  for (const auto& [key, judgment] : labels) out.insert(key.first);
  return out;
}

bool JudgmentSet::all_human() const {
  for (const auto& [key, judgment] : labels) {
    if (judgment.source != kHumanSource) return false;
  }
  return true;
}

const Turn* Conversation::find_turn(int turn_index) const {
  // Indices are 1..n contiguous, so direct lookup.
  if (turn_index < 1 || static_cast<std::size_t>(turn_index) > turns.size()) return nullptr;
  return &turns[static_cast<std::size_t>(turn_index) - 1];
}

// ---- run files ----

std::vector<RunRecord> parse_run_records(const std::string& text) {
  std::vector<RunRecord> out;
  for_each_line(text, [&out](int line_no, const std::string& line) {
    const auto fields = split_fields(line);
    if (fields.size() != 6) {
      raise(Errc::malformed_line,
            "line " + std::to_string(line_no) + ": expected 6 fields, got " +
                std::to_string(fields.size()));
    }
    const auto rank = to_int(fields[3]);
    if (!rank || *rank < 1) {
      raise(Errc::malformed_line, "line " + std::to_string(line_no) + ": bad rank '" + fields[3] + "'");
    }
    const auto score = to_double(fields[4]);
    if (!score) {
      raise(Errc::malformed_line, "line " + std::to_string(line_no) + ": bad score '" + fields[4] + "'");
    }
    out.push_back({fields[0], fields[2], *rank, *score, fields[5]});
  });
  return out;
}

RunSet group_runs(const std::vector<RunRecord>& records) {
  // (run_tag, query_id) -> records, then sort each list by rank.
  std::map<std::string, std::map<std::string, std::vector<const RunRecord*>>> grouped;
  for (const auto& rec : records) grouped[rec.run_tag][rec.query_id].push_back(&rec);

  RunSet out;
  for (auto& [tag, queries] : grouped) {
    SystemRun run;
    run.system_id = tag;
    for (auto& [query_id, recs] : queries) {
      std::stable_sort(recs.begin(), recs.end(),
                       [](const RunRecord* a, const RunRecord* b) { return a->rank < b->rank; });
      std::vector<std::string> docs;
      docs.reserve(recs.size());
      std::set<std::string> seen_docs;
      int prev_rank = 0;
      for (const RunRecord* rec : recs) {
        if (!seen_docs.insert(rec->doc_id).second) {
          raise(Errc::duplicate_doc, "(" + query_id + ", " + rec->doc_id + ") in run " + tag);
        }
        if (rec->rank == prev_rank) {
          raise(Errc::duplicate_rank,
                "rank " + std::to_string(rec->rank) + " repeats for query " + query_id +
                    " in run " + tag);
        }
        prev_rank = rec->rank;
        docs.push_back(rec->doc_id);
      }
      run.rankings.emplace(query_id, std::move(docs));
    }
    out.emplace(tag, std::move(run));
  }
  return out;
}

RunSet parse_run(const std::string& text) { return group_runs(parse_run_records(text)); }

std::string write_run(const RunSet& runs) {
  std::string out;
  char buf[64];
  for (const auto& [system_id, run] : runs) {
    for (const auto& [query_id, docs] : run.rankings) {
      const std::size_t n = docs.size();
      for (std::size_t i = 0; i < n; ++i) {
        // Order is all SystemRun keeps; emit descending synthetic scores.
        std::snprintf(buf, sizeof(buf), "%zu %.6f", i + 1, static_cast<double>(n - i));
        out += query_id;
        out += " Q0 ";
        out += docs[i];
        out += ' ';
        out += buf;
        out += ' ';
        out += system_id;
        out += '\n';
      }
    }
  }
  return out;
}

// ---- qrels files ----

JudgmentSet parse_qrels(const std::string& text) {
  JudgmentSet out;
  for_each_line(text, [&out](int line_no, const std::string& line) {
    const auto fields = split_fields(line);
    if (fields.size() != 4) {
      raise(Errc::malformed_line,
            "line " + std::to_string(line_no) + ": expected 4 fields, got " +
                std::to_string(fields.size()));
    }
    const auto grade = to_int(fields[3]);
    if (!grade) {
      raise(Errc::malformed_line, "line " + std::to_string(line_no) + ": bad grade '" + fields[3] + "'");
    }
    if (*grade < kMinGrade || *grade > kMaxGrade) {
      raise(Errc::grade_out_of_range,
            "grade " + fields[3] + " for (" + fields[0] + ", " + fields[2] + ")");
    }
    const PairKey key{fields[0], fields[2]};
    auto [it, inserted] = out.labels.emplace(key, Judgment{*grade, kHumanSource});
    if (!inserted && it->second.grade != *grade) {
      // Exact duplicate lines are tolerated; conflicting grades are not.
      raise(Errc::duplicate_pair,
            "(" + key.first + ", " + key.second + ") graded both " +
                std::to_string(it->second.grade) + " and " + std::to_string(*grade));
    }
  });
  return out;
}

std::string write_qrels(const JudgmentSet& judgments) {
  std::string out;
  for (const auto& [key, judgment] : judgments.labels) {
    out += key.first;
    out += " 0 ";
    out += key.second;
    out += ' ';
    out += std::to_string(judgment.grade);
    out += '\n';
  }
  return out;
}

std::string write_provenance(const JudgmentSet& judgments) {
  std::string out;
  for (const auto& [key, judgment] : judgments.labels) {
    out += key.first;
    out += '\t';
    out += key.second;
    out += '\t';
    out += judgment.source;
    out += '\n';
  }
  return out;
}

void apply_provenance(JudgmentSet& judgments, const std::string& sidecar_text) {
  for_each_line(sidecar_text, [&judgments](int line_no, const std::string& line) {
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) {
      raise(Errc::malformed_line, "provenance line " + std::to_string(line_no));
    }
    const PairKey key{line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1)};
    auto it = judgments.labels.find(key);
    if (it != judgments.labels.end()) it->second.source = line.substr(t2 + 1);
  });
}

// ---- topic files ----

namespace {

const json* get_field(const json& obj, const char* name, const std::string& path) {
  auto it = obj.find(name);
  if (it == obj.end()) raise(Errc::missing_field, path);
  return &*it;
}

std::string get_string(const json& obj, const char* name, const std::string& path) {
  const json* v = get_field(obj, name, path);
  if (!v->is_string()) raise(Errc::missing_field, path + " (not a string)");
  return v->get<std::string>();
}

}  // namespace

ConversationSet parse_topics(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    raise(Errc::malformed_line, std::string("topic file: ") + e.what());
  }
  if (!doc.is_array()) raise(Errc::missing_field, "top-level array of conversations");

  ConversationSet out;
  for (std::size_t ci = 0; ci < doc.size(); ++ci) {
    const json& cobj = doc[ci];
    const std::string cpath = "conversations[" + std::to_string(ci) + "]";
    if (!cobj.is_object()) raise(Errc::missing_field, cpath);
    Conversation conv;
    conv.conversation_id = get_string(cobj, "conversation_id", cpath + ".conversation_id");
    if (auto it = cobj.find("aux_text"); it != cobj.end() && it->is_string()) {
      conv.aux_text = it->get<std::string>();
    }
    const json* turns = get_field(cobj, "turns", cpath + ".turns");
    if (!turns->is_array()) raise(Errc::missing_field, cpath + ".turns (not an array)");
    for (std::size_t ti = 0; ti < turns->size(); ++ti) {
      const json& tobj = (*turns)[ti];
      const std::string tpath = "turns[" + std::to_string(ti) + "]";
      if (!tobj.is_object()) raise(Errc::missing_field, tpath);
      Turn turn;
      const json* idx = get_field(tobj, "turn_index", tpath + ".turn_index");
      if (!idx->is_number_integer()) raise(Errc::missing_field, tpath + ".turn_index (not an integer)");
      turn.turn_index = idx->get<int>();
      turn.utterance = get_string(tobj, "utterance", tpath + ".utterance");
      turn.resolved_utterance =
          get_string(tobj, "resolved_utterance", tpath + ".resolved_utterance");
      if (turn.resolved_utterance.empty()) {
        raise(Errc::missing_field, tpath + ".resolved_utterance");
      }
      turn.response = get_string(tobj, "response", tpath + ".response");
      if (turn.turn_index != static_cast<int>(ti) + 1) {
        raise(Errc::non_contiguous_turns, conv.conversation_id);
      }
      conv.turns.push_back(std::move(turn));
    }
    std::string conversation_id = conv.conversation_id;
    if (!out.emplace(std::move(conversation_id), std::move(conv)).second) {
      raise(Errc::invalid_argument, "duplicate conversation_id");
    }
  }
  return out;
}

// ---- depth ----

namespace {

/// Rewrites `(?<depth>...)` / `(?P<depth>...)` to a plain group (std::regex
/// has no named groups) and returns the group's 1-based index.
std::pair<std::string, int> translate_named_group(const std::string& pattern) {
  static const std::string markers[] = {"(?<depth>", "(?P<depth>"};
  for (const auto& marker : markers) {
    const std::size_t at = pattern.find(marker);
    if (at == std::string::npos) continue;
    // Count capturing groups opening before the marker.
    int groups_before = 0;
    bool in_class = false;
    for (std::size_t i = 0; i < at; ++i) {
      const char c = pattern[i];
      if (c == '\\') { ++i; continue; }
      if (in_class) {
        if (c == ']') in_class = false;
        continue;
      }
      if (c == '[') { in_class = true; continue; }
      if (c == '(' && (i + 1 >= pattern.size() || pattern[i + 1] != '?')) ++groups_before;
    }
    std::string translated = pattern.substr(0, at) + "(" + pattern.substr(at + marker.size());
    return {translated, groups_before + 1};
  }
  return {pattern, 1};
}

}  // namespace

DepthPattern DepthPattern::compile(const std::string& pattern_text) {
  auto [translated, group_index] = translate_named_group(pattern_text);
  DepthPattern out;
  out.text_ = pattern_text;
  out.group_index_ = group_index;
  try {
    out.re_ = std::regex(translated, std::regex::ECMAScript);
  } catch (const std::regex_error& e) {
    raise(Errc::invalid_argument, "depth pattern does not compile: " + std::string(e.what()));
  }
  if (out.re_.mark_count() < static_cast<std::size_t>(group_index)) {
    raise(Errc::invalid_argument, "depth pattern has no capture group");
  }
  return out;
}

const DepthPattern& DepthPattern::default_pattern() {
  static const DepthPattern p = compile("^.*[_-](?<depth>[0-9]+)$");
  return p;
}

int DepthPattern::extract(const std::string& query_id) const {
  return split(query_id).second;
}

std::pair<std::string, int> DepthPattern::split(const std::string& query_id) const {
  std::smatch m;
  if (!std::regex_search(query_id, m, re_) || !m[group_index_].matched) {
    raise(Errc::no_match, query_id);
  }
  const std::string captured = m[group_index_].str();
  const auto depth = to_int(captured);
  if (!depth || *depth < 1) {
    raise(Errc::no_match, query_id + " (captured '" + captured + "')");
  }
  std::string prefix = query_id.substr(0, static_cast<std::size_t>(m.position(group_index_)));
  if (!prefix.empty() && (prefix.back() == '_' || prefix.back() == '-')) prefix.pop_back();
  return {prefix, *depth};
}

int extract_depth(const std::string& query_id, const DepthPattern& pattern) {
  return pattern.extract(query_id);
}

std::map<std::string, int> depth_map(const std::set<std::string>& query_ids,
                                     const DepthPattern& pattern) {
  std::map<std::string, int> out;
  for (const auto& query_id : query_ids) out.emplace(query_id, pattern.extract(query_id));
  return out;
}

// ---- teams ----

std::map<std::string, std::string> parse_team_map(const std::string& text) {
  std::map<std::string, std::string> out;
  for_each_line(text, [&out](int line_no, const std::string& line) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size()) {
      raise(Errc::malformed_line, "team map line " + std::to_string(line_no));
    }
    out[line.substr(0, tab)] = line.substr(tab + 1);
  });
  return out;
}

RunSet map_teams(RunSet runs, const std::map<std::string, std::string>& system_to_team) {
  for (auto& [system_id, run] : runs) {
    auto it = system_to_team.find(system_id);
    if (it == system_to_team.end()) raise(Errc::unmapped_system, system_id);
    if (it->second.empty()) raise(Errc::invalid_argument, "empty team_id for " + system_id);
    run.team_id = it->second;
  }
  return runs;
}

// ---- passages ----

std::map<std::string, std::string> parse_passages(const std::string& text) {
  std::map<std::string, std::string> out;
  for_each_line(text, [&out](int line_no, const std::string& line) {
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      raise(Errc::malformed_line, "passage line " + std::to_string(line_no));
    }
    const std::string doc_id = line.substr(0, tab);
    std::string body = line.substr(tab + 1);
    auto it = out.find(doc_id);
    if (it == out.end()) {
      out.emplace(doc_id, std::move(body));
    } else if (it->second != body) {
      raise(Errc::duplicate_pair, "passage " + doc_id + " has conflicting text");
    }
  });
  return out;
}

std::set<std::string> all_query_ids(const RunSet& runs) {
  std::set<std::string> out;
  for (const auto& [system_id, run] : runs) {
    for (const auto& [query_id, docs] : run.rankings) out.insert(query_id);
  }
  return out;
}

}  // namespace refill
