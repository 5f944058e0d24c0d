#include "rankinfer/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace rankinfer {

namespace {

constexpr const char* kTrialHeader = "edge_id,trial,winner";
constexpr const char* kAggregateHeader = "edge_id,item,wins,trials";
constexpr const char* kEdgeTag = "# edge,";
constexpr const char* kItemsTag = "# items,";

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(s);
  while (std::getline(in, field, sep)) out.push_back(trim(field));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

bool starts_with(const std::string& s, const char* prefix) {
  return s.rfind(prefix, 0) == 0;
}

long parse_int(const std::string& s, std::size_t line, const std::string& what) {
  long value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw ParseError(line, what + " '" + s + "' is not an integer");
  }
  return value;
}

// Dense ids in order of first appearance.
class IdMap {
 public:
  Index intern(const std::string& id, std::size_t line) {
    if (id.empty()) throw ParseError(line, "empty item id");
    auto [it, inserted] = index_.try_emplace(id, static_cast<Index>(ids_.size()));
    if (inserted) ids_.push_back(id);
    return it->second;
  }
  std::vector<std::string> take() { return std::move(ids_); }

 private:
  std::unordered_map<std::string, Index> index_;
  std::vector<std::string> ids_;
};

// One edge record as read from a file, members in file order.
struct RawEdge {
  std::string id;
  std::size_t line = 0;
  std::vector<Index> members;
  std::vector<int> wins;        // aligned with members (aggregate input)
  std::vector<Index> winners;   // item index per trial (trial input)
  int trials = 0;
};

void read_items_line(const std::string& line, std::size_t lineno, IdMap& ids) {
  const std::string rest = line.substr(std::string(kItemsTag).size());
  for (const std::string& id : split(rest, ';')) ids.intern(id, lineno);
}

ComparisonDataset assemble(std::vector<RawEdge> raw, IdMap ids, bool trial_level,
                           std::vector<std::string>* warnings) {
  if (raw.empty()) throw ParseError(0, "no edges in input");
  const Index m_way = static_cast<Index>(raw.front().members.size());
  for (const RawEdge& r : raw) {
    if (r.members.size() < 2) {
      throw ParseError(r.line, "edge " + r.id + " has fewer than two members");
    }
    if (static_cast<Index>(r.members.size()) != m_way) {
      throw ParseError(r.line, "edge " + r.id + " has " + std::to_string(r.members.size()) +
                                   " members, expected " + std::to_string(m_way));
    }
    std::vector<Index> sorted = r.members;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ParseError(r.line, "edge " + r.id + " lists an item twice");
    }
  }

  // Merge records that share a member set.
  std::map<std::vector<Index>, std::size_t> group_of;
  std::vector<RawEdge> merged;
  for (RawEdge& r : raw) {
    std::vector<Index> key = r.members;
    std::sort(key.begin(), key.end());
    auto [it, inserted] = group_of.try_emplace(key, merged.size());
    if (inserted) {
      merged.push_back(std::move(r));
      continue;
    }
    RawEdge& into = merged[it->second];
    if (warnings) {
      warnings->push_back("edge " + r.id + " repeats the items of edge " + into.id +
                          "; outcomes merged");
    }
    into.trials += r.trials;
    into.winners.insert(into.winners.end(), r.winners.begin(), r.winners.end());
    for (std::size_t k = 0; k < r.members.size(); ++k) {
      const auto pos = std::find(into.members.begin(), into.members.end(), r.members[k]) -
                       into.members.begin();
      into.wins[static_cast<std::size_t>(pos)] += r.wins[k];
    }
  }
  const int trials = merged.front().trials;
  for (const RawEdge& r : merged) {
    if (r.trials != trials) {
      throw ParseError(r.line, "edge " + r.id + " has " + std::to_string(r.trials) +
                                   " trials, expected " + std::to_string(trials));
    }
  }

  std::vector<std::string> labels = ids.take();
  const Index n = static_cast<Index>(labels.size());
  std::vector<Edge> edges;
  edges.reserve(merged.size());
  for (const auto& [key, g] : group_of) edges.emplace_back(key);
  ComparisonHypergraph graph(n, m_way, std::move(edges));

  // group_of iterates in sorted key order, which is the graph's edge order.
  auto position = [](const Edge& edge, Index item) {
    return static_cast<Index>(std::lower_bound(edge.members.begin(), edge.members.end(), item) -
                              edge.members.begin());
  };
  Index e = 0;
  if (trial_level) {
    TrialMatrix winners(graph.num_edges(), trials);
    for (const auto& [key, g] : group_of) {
      const Edge& edge = graph.edge(e);
      const RawEdge& r = merged[g];
      for (int t = 0; t < trials; ++t) {
        winners(e, t) = static_cast<std::uint8_t>(position(edge, r.winners[static_cast<std::size_t>(t)]));
      }
      ++e;
    }
    ComparisonDataset out(std::move(graph), std::move(winners));
    out.set_item_ids(std::move(labels));
    return out;
  }
  WinMatrix wins(graph.num_edges(), m_way);
  for (const auto& [key, g] : group_of) {
    const Edge& edge = graph.edge(e);
    const RawEdge& r = merged[g];
    for (std::size_t k = 0; k < r.members.size(); ++k) {
      wins(e, position(edge, r.members[k])) = r.wins[k];
    }
    ++e;
  }
  ComparisonDataset out(std::move(graph), trials, std::move(wins));
  out.set_item_ids(std::move(labels));
  return out;
}

ComparisonDataset read_trial_csv(std::istream& in, std::vector<std::string>* warnings) {
  IdMap ids;
  std::vector<RawEdge> raw;
  std::unordered_map<std::string, std::size_t> edge_index;
  // (trial number, line) per edge, checked for 1..T once all rows are in.
  std::vector<std::vector<std::pair<long, std::size_t>>> seen;
  bool header = false;
  bool any = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    any = true;
    if (line[0] == '#') {
      if (starts_with(line, kItemsTag)) {
        read_items_line(line, lineno, ids);
      } else if (starts_with(line, kEdgeTag)) {
        const auto fields = split(line.substr(std::string(kEdgeTag).size()), ',');
        if (fields.size() != 2 || fields[0].empty()) {
          throw ParseError(lineno, "edge declaration must read '# edge,<edge_id>,<item;item;...>'");
        }
        if (edge_index.count(fields[0])) {
          throw ParseError(lineno, "edge " + fields[0] + " declared twice");
        }
        RawEdge r;
        r.id = fields[0];
        r.line = lineno;
        for (const std::string& item : split(fields[1], ';')) {
          r.members.push_back(ids.intern(item, lineno));
        }
        r.wins.assign(r.members.size(), 0);
        edge_index.emplace(r.id, raw.size());
        raw.push_back(std::move(r));
        seen.emplace_back();
      }
      continue;
    }
    if (!header) {
      if (line != kTrialHeader) {
        throw ParseError(lineno, std::string("expected header '") + kTrialHeader + "'");
      }
      header = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 3) throw ParseError(lineno, "expected 3 fields");
    auto it = edge_index.find(fields[0]);
    if (it == edge_index.end()) {
      throw ParseError(lineno, "edge " + fields[0] + " was not declared");
    }
    RawEdge& r = raw[it->second];
    const long trial = parse_int(fields[1], lineno, "trial");
    if (trial < 1) throw ParseError(lineno, "trial numbers start at 1");
    const Index winner = ids.intern(fields[2], lineno);
    const auto pos = std::find(r.members.begin(), r.members.end(), winner) - r.members.begin();
    if (pos == static_cast<std::ptrdiff_t>(r.members.size())) {
      throw ParseError(lineno, "winner " + fields[2] + " is not a member of edge " + r.id);
    }
    seen[it->second].emplace_back(trial, lineno);
    r.winners.push_back(winner);
    ++r.wins[static_cast<std::size_t>(pos)];
    ++r.trials;
  }
  if (!any) throw ParseError(1, "empty file");
  if (!header) throw ParseError(lineno, std::string("missing header '") + kTrialHeader + "'");

  for (std::size_t i = 0; i < raw.size(); ++i) {
    RawEdge& r = raw[i];
    if (r.trials == 0) throw ParseError(r.line, "edge " + r.id + " has no trials");
    // Order trials by their number; they must be exactly 1..T.
    std::vector<std::size_t> order(seen[i].size());
    for (std::size_t t = 0; t < order.size(); ++t) order[t] = t;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return seen[i][a].first < seen[i][b].first; });
    std::vector<Index> winners(order.size());
    for (std::size_t t = 0; t < order.size(); ++t) {
      const auto& [trial, at] = seen[i][order[t]];
      if (trial != static_cast<long>(t + 1)) {
        throw ParseError(at, "edge " + r.id + " trial " + std::to_string(trial) +
                                 (trial <= static_cast<long>(t) ? " repeated" : " out of sequence"));
      }
      winners[t] = r.winners[order[t]];
    }
    r.winners = std::move(winners);
  }
  return assemble(std::move(raw), std::move(ids), true, warnings);
}

ComparisonDataset read_aggregate_csv(std::istream& in, std::vector<std::string>* warnings) {
  IdMap ids;
  std::vector<RawEdge> raw;
  std::vector<std::size_t> last_line;
  std::unordered_map<std::string, std::size_t> edge_index;
  bool header = false;
  bool any = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    any = true;
    if (line[0] == '#') {
      if (starts_with(line, kItemsTag)) read_items_line(line, lineno, ids);
      continue;
    }
    if (!header) {
      if (line != kAggregateHeader) {
        throw ParseError(lineno, std::string("expected header '") + kAggregateHeader + "'");
      }
      header = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 4) throw ParseError(lineno, "expected 4 fields");
    if (fields[0].empty()) throw ParseError(lineno, "empty edge id");
    auto [it, inserted] = edge_index.try_emplace(fields[0], raw.size());
    if (inserted) {
      RawEdge r;
      r.id = fields[0];
      r.line = lineno;
      raw.push_back(std::move(r));
      last_line.push_back(lineno);
    }
    RawEdge& r = raw[it->second];
    last_line[it->second] = lineno;
    const Index item = ids.intern(fields[1], lineno);
    if (std::find(r.members.begin(), r.members.end(), item) != r.members.end()) {
      throw ParseError(lineno, "item " + fields[1] + " listed twice on edge " + r.id);
    }
    const long wins = parse_int(fields[2], lineno, "wins");
    const long trials = parse_int(fields[3], lineno, "trials");
    if (wins < 0) throw ParseError(lineno, "negative wins on edge " + r.id);
    if (trials < 1) throw ParseError(lineno, "trials must be positive on edge " + r.id);
    if (inserted) {
      r.trials = static_cast<int>(trials);
    } else if (r.trials != trials) {
      throw ParseError(lineno, "edge " + r.id + " reports trials " + std::to_string(trials) +
                                   " after " + std::to_string(r.trials));
    }
    r.members.push_back(item);
    r.wins.push_back(static_cast<int>(wins));
  }
  if (!any) throw ParseError(1, "empty file");
  if (!header) throw ParseError(lineno, std::string("missing header '") + kAggregateHeader + "'");
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const RawEdge& r = raw[i];
    long total = 0;
    for (int w : r.wins) total += w;
    if (total != r.trials) {
      throw ParseError(last_line[i], "wins on edge " + r.id + " sum to " + std::to_string(total) +
                                         ", expected " + std::to_string(r.trials));
    }
  }
  return assemble(std::move(raw), std::move(ids), false, warnings);
}

std::string edge_label(Index e) { return "e" + std::to_string(e + 1); }

void check_label(const std::string& id) {
  if (id.empty() || id.find_first_of(",;#\n\r") != std::string::npos || trim(id) != id) {
    throw ValidationError("item id '" + id + "' cannot be written to CSV");
  }
}

void write_items_line(std::ostream& out, const ComparisonDataset& data) {
  out << kItemsTag;
  const auto& ids = data.item_ids();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    check_label(ids[i]);
    out << (i ? ";" : "") << ids[i];
  }
  out << '\n';
}

}  // namespace

DatasetFormat parse_format(const std::string& name) {
  if (name == "trial-csv") return DatasetFormat::kTrialCsv;
  if (name == "aggregate-csv") return DatasetFormat::kAggregateCsv;
  if (name == "json") return DatasetFormat::kJson;
  throw ValidationError("unknown dataset format '" + name + "'");
}

std::string to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kTrialCsv: return "trial-csv";
    case DatasetFormat::kAggregateCsv: return "aggregate-csv";
    case DatasetFormat::kJson: return "json";
  }
  return "";
}

DatasetFormat infer_format(const std::filesystem::path& path) {
  if (path.extension() == ".json") return DatasetFormat::kJson;
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (starts_with(line, kEdgeTag) || line == kTrialHeader) return DatasetFormat::kTrialCsv;
    if (line == kAggregateHeader) return DatasetFormat::kAggregateCsv;
    if (line[0] == '{') return DatasetFormat::kJson;
    if (line[0] != '#') break;
  }
  throw ValidationError("cannot tell the format of " + path.string() + "; pass --format");
}

ComparisonDataset read_dataset(std::istream& in, DatasetFormat format,
                               std::vector<std::string>* warnings) {
  switch (format) {
    case DatasetFormat::kTrialCsv: return read_trial_csv(in, warnings);
    case DatasetFormat::kAggregateCsv: return read_aggregate_csv(in, warnings);
    case DatasetFormat::kJson: {
      std::stringstream buffer;
      buffer << in.rdbuf();
      if (trim(buffer.str()).empty()) throw ParseError(1, "empty file");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(buffer.str());
      } catch (const nlohmann::json::parse_error& err) {
        throw ParseError(0, err.what());
      }
      return dataset_from_json(j);
    }
  }
  throw ValidationError("unknown dataset format");
}

ComparisonDataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                               std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path.string());
  return read_dataset(in, format, warnings);
}

void write_dataset(std::ostream& out, const ComparisonDataset& data, DatasetFormat format) {
  const ComparisonHypergraph& graph = data.graph();
  const auto& ids = data.item_ids();
  switch (format) {
    case DatasetFormat::kTrialCsv: {
      const TrialMatrix& winners = data.trial_winners();
      write_items_line(out, data);
      for (Index e = 0; e < graph.num_edges(); ++e) {
        out << kEdgeTag << edge_label(e) << ',';
        const Edge& edge = graph.edge(e);
        for (Index k = 0; k < edge.size(); ++k) {
          out << (k ? ";" : "") << ids[static_cast<std::size_t>(edge[k])];
        }
        out << '\n';
      }
      out << kTrialHeader << '\n';
      for (Index e = 0; e < graph.num_edges(); ++e) {
        for (Index t = 0; t < winners.cols(); ++t) {
          const Index item = graph.edge(e)[winners(e, t)];
          out << edge_label(e) << ',' << t + 1 << ',' << ids[static_cast<std::size_t>(item)]
              << '\n';
        }
      }
      return;
    }
    case DatasetFormat::kAggregateCsv: {
      write_items_line(out, data);
      out << kAggregateHeader << '\n';
      for (Index e = 0; e < graph.num_edges(); ++e) {
        const Edge& edge = graph.edge(e);
        for (Index k = 0; k < edge.size(); ++k) {
          out << edge_label(e) << ',' << ids[static_cast<std::size_t>(edge[k])] << ','
              << data.wins()(e, k) << ',' << data.trials() << '\n';
        }
      }
      return;
    }
    case DatasetFormat::kJson:
      out << dataset_to_json(data).dump(1) << '\n';
      return;
  }
}

void save_dataset(const std::filesystem::path& path, const ComparisonDataset& data,
                  DatasetFormat format) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path.string());
  write_dataset(out, data, format);
  if (!out) throw ResourceError("failed writing " + path.string());
}

nlohmann::json dataset_to_json(const ComparisonDataset& data) {
  const ComparisonHypergraph& graph = data.graph();
  nlohmann::json edges = nlohmann::json::array();
  nlohmann::json wins = nlohmann::json::array();
  for (Index e = 0; e < graph.num_edges(); ++e) {
    edges.push_back(graph.edge(e).members);
    nlohmann::json row = nlohmann::json::array();
    for (Index k = 0; k < graph.m_way(); ++k) row.push_back(data.wins()(e, k));
    wins.push_back(std::move(row));
  }
  nlohmann::json j;
  j["graph"] = {{"n", graph.n()}, {"m_way", graph.m_way()}, {"edges", std::move(edges)}};
  j["trials"] = data.trials();
  j["wins"] = std::move(wins);
  if (data.has_trial_level()) {
    const TrialMatrix& winners = data.trial_winners();
    nlohmann::json rows = nlohmann::json::array();
    for (Index e = 0; e < winners.rows(); ++e) {
      nlohmann::json row = nlohmann::json::array();
      for (Index t = 0; t < winners.cols(); ++t) row.push_back(int{winners(e, t)});
      rows.push_back(std::move(row));
    }
    j["trial_level"] = std::move(rows);
  }
  j["item_ids"] = data.item_ids();
  return j;
}

ComparisonDataset dataset_from_json(const nlohmann::json& j) {
  try {
    const auto& g = j.at("graph");
    const Index n = g.at("n").get<Index>();
    const Index m_way = g.at("m_way").get<Index>();
    std::vector<Edge> edges;
    for (const auto& e : g.at("edges")) {
      try {
        edges.emplace_back(e.get<std::vector<Index>>());
      } catch (const InvalidEdgeError& err) {
        throw ParseError(0, std::string("edge ") + std::to_string(edges.size()) + ": " + err.what());
      }
    }
    const std::size_t declared = edges.size();
    ComparisonHypergraph graph(n, m_way, std::move(edges));
    if (static_cast<std::size_t>(graph.num_edges()) != declared) {
      throw ParseError(0, "edges must be distinct in a JSON dataset");
    }
    // Rows follow the order given in the file, which must already be sorted.
    for (Index e = 0; e < graph.num_edges(); ++e) {
      if (graph.edge(e).members != g.at("edges")[static_cast<std::size_t>(e)].get<std::vector<Index>>()) {
        throw ParseError(0, "edges must be listed in sorted order in a JSON dataset");
      }
    }
    const int trials = j.at("trials").get<int>();
    const auto& w = j.at("wins");
    if (w.size() != static_cast<std::size_t>(graph.num_edges())) {
      throw ParseError(0, "wins has the wrong number of rows");
    }
    WinMatrix wins(graph.num_edges(), m_way);
    for (Index e = 0; e < graph.num_edges(); ++e) {
      const auto row = w[static_cast<std::size_t>(e)].get<std::vector<int>>();
      if (static_cast<Index>(row.size()) != m_way) {
        throw ParseError(0, "wins row " + std::to_string(e) + " has the wrong length");
      }
      for (Index k = 0; k < m_way; ++k) wins(e, k) = row[static_cast<std::size_t>(k)];
    }

    std::optional<ComparisonDataset> out;
    if (j.contains("trial_level")) {
      const auto& t = j.at("trial_level");
      if (t.size() != static_cast<std::size_t>(graph.num_edges())) {
        throw ParseError(0, "trial_level has the wrong number of rows");
      }
      TrialMatrix winners(graph.num_edges(), trials);
      for (Index e = 0; e < graph.num_edges(); ++e) {
        const auto row = t[static_cast<std::size_t>(e)].get<std::vector<int>>();
        if (static_cast<int>(row.size()) != trials) {
          throw ParseError(0, "trial_level row " + std::to_string(e) + " has the wrong length");
        }
        for (int l = 0; l < trials; ++l) {
          const int pos = row[static_cast<std::size_t>(l)];
          if (pos < 0 || pos >= m_way) {
            throw ParseError(0, "trial_level row " + std::to_string(e) + " has winner position " +
                                    std::to_string(pos));
          }
          winners(e, l) = static_cast<std::uint8_t>(pos);
        }
      }
      out.emplace(std::move(graph), std::move(winners));
      if (out->wins() != wins) throw ParseError(0, "wins disagree with trial_level");
    } else {
      out.emplace(std::move(graph), trials, std::move(wins));
    }
    if (j.contains("item_ids")) out->set_item_ids(j.at("item_ids").get<std::vector<std::string>>());
    return std::move(*out);
  } catch (const nlohmann::json::exception& err) {
    throw ParseError(0, std::string("malformed dataset JSON: ") + err.what());
  }
}

}  // namespace rankinfer
