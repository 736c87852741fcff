// Copyright 2026 The deskasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eval/report.h"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace deskasr::eval {

namespace {

std::string ReadAll(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string StripCr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

UttList ParseUttList(const std::string& text, const std::string& origin) {
  UttList out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    std::string id = line.substr(0, tab);
    // A manifest line (id, wav, text) contributes its last field.
    const size_t last = line.rfind('\t');
    std::string body = tab == std::string::npos ? "" : line.substr(last + 1);
    if (id.empty()) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": empty utterance id");
    }
    if (!seen.insert(id).second) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) +
                               ": duplicate utterance id '" + id + "'");
    }
    out.emplace_back(std::move(id), std::move(body));
  }
  return out;
}

UttList ReadUttList(const std::string& path) {
  return ParseUttList(ReadAll(path), path);
}

CorpusScore ScoreCorpus(const UttList& ref, const UttList& hyp, Unit unit) {
  CorpusScore s;
  s.unit = unit;
  std::map<std::string, const std::string*> hyp_by_id;
  for (const auto& [id, text] : hyp) hyp_by_id[id] = &text;
  std::set<std::string> ref_ids;
  for (const auto& [id, text] : ref) {
    ref_ids.insert(id);
    const auto it = hyp_by_id.find(id);
    if (it == hyp_by_id.end()) {
      s.missing_in_hyp.push_back(id);
      continue;
    }
    s.ids.push_back(id);
    s.pairs.push_back(ScorePair(text, *it->second, unit));
  }
  for (const auto& [id, text] : hyp) {
    if (!ref_ids.count(id)) s.missing_in_ref.push_back(id);
  }
  s.totals = Totals(s.pairs);
  s.rate = ErrorRate(s.totals);
  return s;
}

std::string FormatHuman(const ScoreReport& r) {
  const CorpusScore& s = r.score;
  const char* name = s.unit == Unit::kChar ? "CER" : "WER";
  std::ostringstream os;
  os << name << " " << FormatFixed(s.rate, 2) << "% [ "
     << s.totals.distance() << " / " << s.totals.ref_len << ", sub "
     << s.totals.sub << ", del " << s.totals.del << ", ins " << s.totals.ins
     << " ] over " << s.pairs.size() << " utterances (" << kNormalizationVersion
     << ")\n";
  if (r.baseline) {
    os << "baseline " << name << " " << FormatFixed(r.baseline->rate, 2)
       << "%, relative reduction "
       << (r.cerr ? FormatFixed(*r.cerr, 1) + "%" : "undefined") << "\n";
  }
  return os.str();
}

std::string FormatMachine(const ScoreReport& r) {
  const CorpusScore& s = r.score;
  std::ostringstream os;
  os.precision(17);
  os << "unit=" << UnitName(s.unit) << "\n"
     << "normalization=" << kNormalizationVersion << "\n"
     << "utterances=" << s.pairs.size() << "\n"
     << "ref_units=" << s.totals.ref_len << "\n"
     << "sub=" << s.totals.sub << "\n"
     << "del=" << s.totals.del << "\n"
     << "ins=" << s.totals.ins << "\n"
     << "errors=" << s.totals.distance() << "\n"
     << "rate=" << FormatFixed(s.rate, 2) << "\n"
     << "rate_exact=" << s.rate << "\n";
  if (r.baseline) {
    os << "baseline_rate=" << FormatFixed(r.baseline->rate, 2) << "\n";
    if (r.cerr) {
      os << "cerr=" << FormatFixed(*r.cerr, 1) << "\n"
         << "cerr_exact=" << *r.cerr << "\n";
    } else {
      os << "cerr=undefined\n";
    }
  }
  return os.str();
}

BenchmarkTable ParseTable(const std::string& text) {
  BenchmarkTable t;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool header = true;
  while (std::getline(in, line)) {
    ++line_no;
    line = StripCr(line);
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> cells = SplitTabs(line);
    if (header) {
      if (cells.size() < 2) {
        throw std::runtime_error("table line " + std::to_string(line_no) +
                                 ": header needs at least one test set");
      }
      t.sets.assign(cells.begin() + 1, cells.end());
      header = false;
      continue;
    }
    if (cells.size() != t.sets.size() + 1) {
      throw std::runtime_error("table line " + std::to_string(line_no) +
                               ": expected " + std::to_string(t.sets.size()) +
                               " rates");
    }
    BenchmarkRow row;
    row.system = cells[0];
    for (size_t i = 1; i < cells.size(); ++i) {
      size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cells[i], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != cells[i].size() || cells[i].empty()) {
        throw std::runtime_error("table line " + std::to_string(line_no) +
                                 ": invalid rate '" + cells[i] + "'");
      }
      row.rates.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (header) throw std::runtime_error("table is empty");
  return t;
}

BenchmarkTable ReadTable(const std::string& path) {
  return ParseTable(ReadAll(path));
}

void ComputeTable(BenchmarkTable& table,
                  const std::optional<std::string>& baseline) {
  for (BenchmarkRow& row : table.rows) row.average = AverageN(row.rates);
  table.baseline = baseline;
  table.cerr.clear();
  if (!baseline) return;
  const BenchmarkRow* base = nullptr;
  for (const BenchmarkRow& row : table.rows) {
    if (row.system == *baseline) base = &row;
  }
  if (base == nullptr) {
    throw std::invalid_argument("baseline system '" + *baseline +
                                "' not in table");
  }
  for (const BenchmarkRow& row : table.rows) {
    table.cerr[row.system] = Cerr(base->average, row.average);
  }
}

std::string FormatTableHuman(const BenchmarkTable& t) {
  std::ostringstream os;
  os << "system";
  for (const std::string& s : t.sets) os << "\t" << s;
  os << "\tAverage-" << t.sets.size();
  if (t.baseline) os << "\tCERR";
  os << "\n";
  for (const BenchmarkRow& row : t.rows) {
    os << row.system;
    for (double r : row.rates) os << "\t" << FormatFixed(r, 2);
    os << "\t" << FormatFixed(row.average, 2);
    if (t.baseline) os << "\t" << FormatFixed(t.cerr.at(row.system), 1) << "%";
    os << "\n";
  }
  return os.str();
}

std::string FormatTableMachine(const BenchmarkTable& t) {
  std::ostringstream os;
  os.precision(17);
  for (const BenchmarkRow& row : t.rows) {
    os << row.system << ".average=" << FormatFixed(row.average, 2) << "\n"
       << row.system << ".average_exact=" << row.average << "\n";
    if (t.baseline) {
      os << row.system << ".cerr=" << FormatFixed(t.cerr.at(row.system), 1)
         << "\n";
    }
  }
  return os.str();
}

}  // namespace deskasr::eval
