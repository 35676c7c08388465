#include "haven/symbolic.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>

#include "haven/error.hpp"
#include "haven/util.hpp"

namespace haven {

namespace {

struct Line {
  size_t begin = 0;
  size_t end = 0;  // excludes the newline (and a trailing '\r')
};

std::vector<Line> split_lines(const std::string& text) {
  std::vector<Line> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    size_t end = nl == std::string::npos ? text.size() : nl;
    size_t stop = end;
    if (stop > start && text[stop - 1] == '\r') --stop;
    lines.push_back(Line{start, stop});
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return lines;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_ident(const std::string& s) {
  if (s.empty() || !is_ident_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char);
}

std::optional<Bit> parse_bit(const std::string& cell) {
  if (cell == "0") return Bit::Zero;
  if (cell == "1") return Bit::One;
  if (cell == "x" || cell == "X" || cell == "-") return Bit::DontCare;
  return std::nullopt;
}

// Removes a trailing "..." (or the unicode ellipsis) that marks an elided continuation.
std::string strip_ellipsis(std::string s) {
  s = trim(s);
  while (true) {
    if (ends_with(s, "...")) {
      s = trim(s.substr(0, s.size() - 3));
    } else if (ends_with(s, "\xE2\x80\xA6")) {
      s = trim(s.substr(0, s.size() - 3));
    } else {
      return s;
    }
  }
}

bool is_ellipsis_only(const std::string& s) {
  std::string t = trim(s);
  return !t.empty() && strip_ellipsis(t).empty();
}

// ---- truth tables ------------------------------------------------------------

struct Cells {
  std::vector<std::string> cells;
  std::vector<size_t> offsets;  // byte offset of each cell within the line
  int boundary = -1;            // index of the first output cell when "||" was used
  bool piped = false;
};

Cells split_cells(const std::string& line) {
  Cells c;
  if (line.find('|') != std::string::npos) {
    c.piped = true;
    std::vector<std::pair<std::string, size_t>> raw;
    size_t start = 0;
    while (true) {
      size_t bar = line.find('|', start);
      size_t end = bar == std::string::npos ? line.size() : bar;
      raw.emplace_back(line.substr(start, end - start), start);
      if (bar == std::string::npos) break;
      start = bar + 1;
    }
    // Markdown-style outer bars produce empty edge cells.
    if (!raw.empty() && trim(raw.front().first).empty()) raw.erase(raw.begin());
    if (!raw.empty() && trim(raw.back().first).empty()) raw.pop_back();
    for (const auto& [text, off] : raw) {
      if (trim(text).empty()) {
        if (c.boundary >= 0 || c.cells.empty()) {
          c.cells.push_back("");  // malformed: keep an empty cell so validation fails
          c.offsets.push_back(off);
          continue;
        }
        c.boundary = static_cast<int>(c.cells.size());
        continue;
      }
      size_t lead = 0;
      while (lead < text.size() && std::isspace(static_cast<unsigned char>(text[lead]))) ++lead;
      c.cells.push_back(trim(text));
      c.offsets.push_back(off + lead);
    }
    return c;
  }
  // Runs of two or more blanks (or any tab) separate columns.
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    size_t start = i;
    while (i < line.size()) {
      if (line[i] == '\t') break;
      if (line[i] == ' ' && i + 1 < line.size() && std::isspace(static_cast<unsigned char>(line[i + 1]))) break;
      if (line[i] == ' ' && i + 1 >= line.size()) break;
      ++i;
    }
    c.cells.push_back(trim(line.substr(start, i - start)));
    c.offsets.push_back(start);
  }
  return c;
}

struct HeaderCell {
  std::string name;
  Direction dir = Direction::Unknown;
};

std::optional<HeaderCell> parse_header_cell(const std::string& cell) {
  std::string t = trim(cell);
  size_t paren = t.find('(');
  if (paren == std::string::npos) {
    if (!is_ident(t)) return std::nullopt;
    return HeaderCell{t, Direction::Unknown};
  }
  if (t.back() != ')') return std::nullopt;
  std::string name = trim(t.substr(0, paren));
  std::string tag = to_lower(trim(t.substr(paren + 1, t.size() - paren - 2)));
  if (!is_ident(name)) return std::nullopt;
  if (tag == "in" || tag == "input") return HeaderCell{name, Direction::Input};
  if (tag == "out" || tag == "output") return HeaderCell{name, Direction::Output};
  return std::nullopt;
}

bool is_separator_line(const std::string& line) {
  std::string t = trim(line);
  if (t.find("--") == std::string::npos) return false;
  return std::all_of(t.begin(), t.end(), [](char c) {
    return c == '-' || c == '|' || c == '+' || c == ':' || c == '=' || c == ' ' || c == '\t';
  });
}

struct TableHeader {
  std::vector<HeaderCell> cells;
  int boundary = -1;
  bool piped = false;
  size_t start_in_line = 0;  // offset of the first column name
};

// Header cells of a table line. With pipes, prose before the first column
// name is tolerated ("Implement the table below: a | b | out").
std::optional<TableHeader> parse_table_header(const std::string& line) {
  Cells c = split_cells(line);
  if (c.cells.size() < 2) return std::nullopt;
  TableHeader h;
  h.piped = c.piped;
  h.boundary = c.boundary;
  for (size_t i = 0; i < c.cells.size(); ++i) {
    auto cell = parse_header_cell(c.cells[i]);
    if (!cell && i == 0 && c.piped) {
      const std::string& first = c.cells[0];
      size_t sp = first.find_last_of(" \t");
      if (sp == std::string::npos) return std::nullopt;
      cell = parse_header_cell(first.substr(sp + 1));
      if (!cell) return std::nullopt;
      h.start_in_line = c.offsets[0] + sp + 1;
    } else if (!cell) {
      return std::nullopt;
    } else if (i == 0) {
      h.start_in_line = c.offsets[0];
    }
    h.cells.push_back(*cell);
  }
  return h;
}

bool looks_like_row(const std::string& raw_line, bool piped) {
  std::string line = strip_ellipsis(raw_line);
  if (line.empty()) return false;
  if (piped && line.find('|') == std::string::npos) return false;
  Cells c = piped ? split_cells(line) : Cells{};
  if (!piped) {
    for (const auto& w : split_words(line)) c.cells.push_back(w);
  }
  if (c.cells.empty()) return false;
  for (const auto& cell : c.cells)
    if (cell.empty() || !std::all_of(cell.begin(), cell.end(), [](char ch) {
          return ch == '0' || ch == '1' || ch == 'x' || ch == 'X' || ch == '-';
        }))
      return false;
  return true;
}

struct BlockExtent {
  size_t begin = 0;
  size_t end = 0;
};

// Finds a truth-table block whose header is at lines[i].
std::optional<BlockExtent> scan_table_at(const std::string& text, const std::vector<Line>& lines, size_t i,
                                         size_t* last_line) {
  std::string header_line = text.substr(lines[i].begin, lines[i].end - lines[i].begin);
  auto header = parse_table_header(header_line);
  if (!header) return std::nullopt;
  size_t j = i + 1;
  if (j < lines.size() && is_separator_line(text.substr(lines[j].begin, lines[j].end - lines[j].begin))) ++j;
  size_t last_row = 0;
  bool any = false;
  for (; j < lines.size(); ++j) {
    std::string l = text.substr(lines[j].begin, lines[j].end - lines[j].begin);
    if (looks_like_row(l, header->piped)) {
      last_row = j;
      any = true;
      continue;
    }
    if (is_ellipsis_only(l)) continue;
    break;
  }
  if (!any) return std::nullopt;
  *last_line = last_row;
  return BlockExtent{lines[i].begin + header->start_in_line, lines[last_row].end};
}

// ---- waveforms ---------------------------------------------------------------

struct WaveLine {
  bool is_time = false;
  std::string name;
  std::string unit;
  std::vector<std::string> values;
};

std::optional<WaveLine> parse_wave_line(const std::string& raw) {
  std::string line = strip_ellipsis(raw);
  size_t colon = line.find(':');
  if (colon == std::string::npos) return std::nullopt;
  std::string name = trim(line.substr(0, colon));
  std::string rest = trim(line.substr(colon + 1));
  if (rest.empty()) return std::nullopt;
  WaveLine w;
  static const std::regex time_re(R"(^(time|t)\s*(\(\s*(ns|ps|us|ms|s)\s*\))?$)", std::regex::icase);
  std::smatch m;
  if (std::regex_match(name, m, time_re)) {
    w.is_time = true;
    w.name = name;
    w.unit = m[3].matched ? to_lower(m[3].str()) : "ns";
    for (auto& tok : split_words(rest)) {
      std::string t = tok;
      if (ends_with(to_lower(t), w.unit)) t = t.substr(0, t.size() - w.unit.size());
      if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        return std::nullopt;
      w.values.push_back(t);
    }
    return w;
  }
  if (!is_ident(name)) return std::nullopt;
  w.name = name;
  auto words = split_words(rest);
  if (words.size() == 1 && words[0].size() > 1) {
    for (char c : words[0]) w.values.emplace_back(1, c);
  } else {
    w.values = words;
  }
  for (const auto& v : w.values)
    if (!parse_bit(v) || v == "-") return std::nullopt;
  return w;
}

// ---- state diagrams ----------------------------------------------------------

const std::regex& edge_regex() {
  static const std::regex re(
      R"(([A-Za-z_][A-Za-z0-9_]*)[ \t]*\[([^\[\]\n]*)\][ \t]*--[ \t]*\[([^\[\]\n]*)\][ \t]*-{1,2}>[ \t]*([A-Za-z_][A-Za-z0-9_]*))");
  return re;
}

struct EdgeMatch {
  size_t begin, end;
  std::string from, outputs, cond, to;
};

std::vector<EdgeMatch> find_edges(const std::string& text) {
  std::vector<EdgeMatch> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), edge_regex()); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    out.push_back(EdgeMatch{static_cast<size_t>(m.position(0)), static_cast<size_t>(m.position(0) + m.length(0)),
                            m[1].str(), m[2].str(), m[3].str(), m[4].str()});
  }
  return out;
}

bool is_edge_gap(const std::string& gap) {
  std::string g = gap;
  size_t pos;
  while ((pos = g.find("\xE2\x80\xA6")) != std::string::npos) g.erase(pos, 3);
  return std::all_of(g.begin(), g.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == '.' || c == ',' || c == ';';
  });
}

std::vector<std::pair<std::string, Bit>> parse_output_list(const std::string& text) {
  std::vector<std::pair<std::string, Bit>> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    size_t end = comma == std::string::npos ? text.size() : comma;
    std::string item = trim(text.substr(start, end - start));
    size_t eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::MalformedDiagram, "expected name=bit in '[" + text + "]'");
    std::string name = trim(item.substr(0, eq));
    std::string value = item.substr(eq + 1);
    if (!value.empty() && value[0] == '=') value = value.substr(1);
    value = trim(value);
    auto bit = parse_bit(value);
    if (!is_ident(name) || !bit || value == "-")
      throw Error(ErrorCode::MalformedDiagram, "expected name=bit in '[" + text + "]'");
    for (const auto& [n, b] : out)
      if (n == name) throw Error(ErrorCode::MalformedDiagram, "output '" + name + "' listed twice");
    out.emplace_back(name, *bit);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

bool is_unconditional(const std::string& cond) {
  std::string c = to_lower(trim(cond));
  return c == "1" || c == "true" || c == "always" || c == "1'b1";
}

// "x=0" / "x == 1" -> ("x", "0")
std::optional<std::pair<std::string, std::string>> simple_condition(const std::string& cond) {
  static const std::regex re(R"(^\s*([A-Za-z_][A-Za-z0-9_]*)\s*={1,2}\s*([01xX]|[0-9]+|[0-9]*'[bBdDhH][0-9a-fA-FxX_]+)\s*$)");
  std::smatch m;
  if (!std::regex_match(cond, m, re)) return std::nullopt;
  return std::make_pair(m[1].str(), m[2].str());
}

std::vector<std::string> condition_identifiers(const std::string& cond) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < cond.size()) {
    if (cond[i] == '\'') {
      // skip based literal body such as 'b01
      ++i;
      while (i < cond.size() && is_ident_char(cond[i])) ++i;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(cond[i]))) {
      while (i < cond.size() && is_ident_char(cond[i])) ++i;
      continue;
    }
    if (is_ident_start(cond[i])) {
      size_t s = i;
      while (i < cond.size() && is_ident_char(cond[i])) ++i;
      std::string id = cond.substr(s, i - s);
      std::string l = to_lower(id);
      if (l != "and" && l != "or" && l != "not" && l != "true" && l != "false" && l != "always" &&
          std::find(out.begin(), out.end(), id) == out.end())
        out.push_back(id);
      continue;
    }
    ++i;
  }
  return out;
}

std::string bit_text(Bit b) { return std::string(1, bit_char(b)); }

}  // namespace

char bit_char(Bit b) {
  switch (b) {
    case Bit::Zero: return '0';
    case Bit::One: return '1';
    case Bit::DontCare: return 'X';
  }
  return '?';
}

const char* to_string(Modality m) {
  switch (m) {
    case Modality::NaturalLanguageOnly: return "NaturalLanguageOnly";
    case Modality::TruthTable: return "TruthTable";
    case Modality::Waveform: return "Waveform";
    case Modality::StateDiagram: return "StateDiagram";
    case Modality::Mixed: return "Mixed";
  }
  return "?";
}

const StateInfo* StateDiagram::find_state(const std::string& name) const {
  for (const auto& s : states)
    if (s.name == name) return &s;
  return nullptr;
}

// ---- scanning ----------------------------------------------------------------

std::vector<Span> scan_symbolic_blocks(const std::string& prompt) {
  std::vector<Span> found;
  auto lines = split_lines(prompt);

  for (size_t i = 0; i < lines.size(); ++i) {
    size_t last = 0;
    if (auto ext = scan_table_at(prompt, lines, i, &last)) {
      found.push_back(Span{ext->begin, ext->end, Modality::TruthTable});
      i = last;
    }
  }

  for (size_t i = 0; i < lines.size(); ++i) {
    size_t j = i;
    int signals = 0;
    while (j < lines.size()) {
      auto w = parse_wave_line(prompt.substr(lines[j].begin, lines[j].end - lines[j].begin));
      if (!w) break;
      if (!w->is_time) ++signals;
      ++j;
    }
    if (j > i && signals >= 2 && j - i >= 2) {
      found.push_back(Span{lines[i].begin, lines[j - 1].end, Modality::Waveform});
      i = j - 1;
    }
  }

  auto edges = find_edges(prompt);
  for (size_t i = 0; i < edges.size();) {
    size_t j = i;
    while (j + 1 < edges.size() && is_edge_gap(prompt.substr(edges[j].end, edges[j + 1].begin - edges[j].end))) ++j;
    found.push_back(Span{edges[i].begin, edges[j].end, Modality::StateDiagram});
    i = j + 1;
  }

  std::sort(found.begin(), found.end(), [](const Span& a, const Span& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.end > b.end;
  });
  std::vector<Span> out;
  for (const auto& s : found) {
    if (!out.empty() && s.begin < out.back().end) continue;
    out.push_back(s);
  }
  return out;
}

ModalityDetection detect_modality(const std::string& prompt) {
  ModalityDetection d;
  for (const auto& span : scan_symbolic_blocks(prompt)) {
    std::string block = prompt.substr(span.begin, span.end - span.begin);
    try {
      if (span.kind == Modality::TruthTable) {
        parse_truth_table(block);
      } else if (span.kind == Modality::Waveform) {
        parse_waveform(block);
      } else {
        for (const auto& e : find_edges(block)) {
          parse_output_list(e.outputs);
          if (trim(e.cond).empty()) throw Error(ErrorCode::MalformedDiagram, "empty condition");
        }
      }
    } catch (const Error&) {
      continue;
    }
    d.spans.push_back(span);
  }
  std::set<Modality> kinds;
  for (const auto& s : d.spans) kinds.insert(s.kind);
  if (kinds.empty())
    d.kind = Modality::NaturalLanguageOnly;
  else if (kinds.size() == 1)
    d.kind = *kinds.begin();
  else
    d.kind = Modality::Mixed;
  return d;
}

// ---- parsers -----------------------------------------------------------------

TruthTable parse_truth_table(const std::string& block) {
  auto lines = split_lines(block);
  size_t i = 0;
  while (i < lines.size() && trim(block.substr(lines[i].begin, lines[i].end - lines[i].begin)).empty()) ++i;
  if (i >= lines.size()) throw Error(ErrorCode::EmptyTable, "no header row");
  auto header = parse_table_header(block.substr(lines[i].begin, lines[i].end - lines[i].begin));
  if (!header) throw Error(ErrorCode::MalformedTable, "first line is not a header of column names");

  size_t ncols = header->cells.size();
  std::vector<bool> is_output(ncols, false);
  bool annotated = std::any_of(header->cells.begin(), header->cells.end(),
                               [](const HeaderCell& c) { return c.dir != Direction::Unknown; });
  if (header->boundary >= 0) {
    for (size_t c = static_cast<size_t>(header->boundary); c < ncols; ++c) is_output[c] = true;
  } else if (annotated) {
    for (size_t c = 0; c < ncols; ++c) is_output[c] = header->cells[c].dir == Direction::Output;
  } else {
    is_output[ncols - 1] = true;
  }

  TruthTable t;
  std::set<std::string> names;
  for (size_t c = 0; c < ncols; ++c) {
    const auto& name = header->cells[c].name;
    if (!names.insert(name).second) throw Error(ErrorCode::MalformedTable, "duplicate column '" + name + "'");
    (is_output[c] ? t.outputs : t.inputs).push_back(name);
  }
  if (t.inputs.empty()) throw Error(ErrorCode::MalformedTable, "no input columns");
  if (t.outputs.empty()) throw Error(ErrorCode::MalformedTable, "no output columns");

  std::set<std::vector<Bit>> seen;
  bool after_header = true;
  for (size_t j = i + 1; j < lines.size(); ++j) {
    std::string raw = block.substr(lines[j].begin, lines[j].end - lines[j].begin);
    if (after_header && is_separator_line(raw)) {
      after_header = false;
      continue;
    }
    after_header = false;
    if (trim(raw).empty() || is_ellipsis_only(raw)) continue;
    std::string line = strip_ellipsis(raw);
    std::vector<std::string> cells;
    int boundary = -1;
    if (header->piped) {
      Cells c = split_cells(line);
      cells = c.cells;
      boundary = c.boundary;
    } else {
      cells = split_words(line);
    }
    if (cells.size() != ncols)
      throw Error(ErrorCode::MalformedTable, "row " + std::to_string(t.rows.size() + 1) + " has " +
                                                 std::to_string(cells.size()) + " cells, expected " +
                                                 std::to_string(ncols));
    if (boundary >= 0 && boundary != header->boundary)
      throw Error(ErrorCode::MalformedTable, "row input/output separator does not match the header");
    TruthTable::Row row;
    for (size_t c = 0; c < ncols; ++c) {
      auto bit = parse_bit(cells[c]);
      if (!bit) throw Error(ErrorCode::MalformedTable, "cell '" + cells[c] + "' is not 0, 1 or a don't-care");
      (is_output[c] ? row.out : row.in).push_back(*bit);
    }
    if (!seen.insert(row.in).second) throw Error(ErrorCode::MalformedTable, "duplicate input row");
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw Error(ErrorCode::EmptyTable, "table has no rows");
  return t;
}

Waveform parse_waveform(const std::string& block, const std::optional<IoSignature>& header) {
  Waveform w;
  std::set<std::string> names;
  bool any = false;
  for (const auto& l : split_lines(block)) {
    std::string raw = block.substr(l.begin, l.end - l.begin);
    if (trim(raw).empty()) continue;
    auto line = parse_wave_line(raw);
    if (!line) throw Error(ErrorCode::MalformedWaveform, "cannot parse line '" + trim(raw) + "'");
    any = true;
    if (line->is_time) {
      if (w.time_axis) throw Error(ErrorCode::MalformedWaveform, "more than one time axis");
      std::vector<int64_t> axis;
      for (const auto& v : line->values) {
        try {
          axis.push_back(std::stoll(v));
        } catch (const std::exception&) {
          throw Error(ErrorCode::MalformedWaveform, "bad timestamp '" + v + "'");
        }
      }
      for (size_t k = 1; k < axis.size(); ++k)
        if (axis[k] <= axis[k - 1]) throw Error(ErrorCode::MalformedWaveform, "time axis is not strictly increasing");
      w.time_axis = axis;
      w.time_unit = line->unit;
      continue;
    }
    if (!names.insert(line->name).second)
      throw Error(ErrorCode::MalformedWaveform, "signal '" + line->name + "' listed twice");
    WaveSignal s;
    s.name = line->name;
    for (const auto& v : line->values) s.values.push_back(*parse_bit(v));
    if (header) {
      for (const auto& p : header->ports)
        if (p.name == s.name) s.direction = p.dir;
    }
    w.signals.push_back(std::move(s));
  }
  if (!any || w.signals.empty()) throw Error(ErrorCode::EmptyWaveform, "no signal lines");
  size_t len = w.signals[0].values.size();
  for (const auto& s : w.signals)
    if (s.values.size() != len)
      throw Error(ErrorCode::MalformedWaveform, "signal '" + s.name + "' has " + std::to_string(s.values.size()) +
                                                    " values, expected " + std::to_string(len));
  if (w.time_axis && w.time_axis->size() != len)
    throw Error(ErrorCode::MalformedWaveform, "time axis length differs from signal length");
  return w;
}

StateDiagram parse_state_diagram(const std::string& block) {
  auto edges = find_edges(block);
  if (edges.empty()) throw Error(ErrorCode::MalformedDiagram, "no STATE[out=..]--[cond]->STATE edges found");
  size_t pos = 0;
  for (const auto& e : edges) {
    if (!is_edge_gap(block.substr(pos, e.begin - pos)))
      throw Error(ErrorCode::MalformedDiagram, "unparseable text '" + trim(block.substr(pos, e.begin - pos)) + "'");
    pos = e.end;
  }
  if (!is_edge_gap(block.substr(pos)))
    throw Error(ErrorCode::MalformedDiagram, "unparseable text '" + trim(block.substr(pos)) + "'");

  StateDiagram d;
  for (const auto& e : edges) {
    auto outputs = parse_output_list(e.outputs);
    if (d.output_names.empty()) {
      for (const auto& [n, b] : outputs) d.output_names.push_back(n);
    }
    std::set<std::string> declared;
    for (const auto& [n, b] : outputs) declared.insert(n);
    std::set<std::string> expected(d.output_names.begin(), d.output_names.end());
    if (declared != expected)
      throw Error(ErrorCode::MalformedDiagram, "state '" + e.from + "' does not list the same outputs as the first state");
    // Store in diagram output order.
    std::vector<std::pair<std::string, Bit>> ordered;
    for (const auto& n : d.output_names)
      for (const auto& [on, b] : outputs)
        if (on == n) ordered.emplace_back(n, b);

    auto it = std::find_if(d.states.begin(), d.states.end(), [&](const StateInfo& s) { return s.name == e.from; });
    if (it == d.states.end()) {
      d.states.push_back(StateInfo{e.from, ordered});
    } else if (it->outputs != ordered) {
      throw Error(ErrorCode::InconsistentOutputs, "state '" + e.from + "' is declared with conflicting outputs");
    }
    std::string cond = trim(e.cond);
    if (cond.empty()) throw Error(ErrorCode::MalformedDiagram, "empty transition condition");
    d.transitions.push_back(Transition{e.from, cond, e.to});
  }
  for (const auto& t : d.transitions)
    if (!d.find_state(t.to))
      throw Error(ErrorCode::DanglingState, "state '" + t.to + "' is a transition target but its outputs are never declared");
  return d;
}

SymbolicSpec parse_block(const std::string& block, Modality kind, const std::optional<IoSignature>& header) {
  switch (kind) {
    case Modality::TruthTable: return parse_truth_table(block);
    case Modality::Waveform: return parse_waveform(block, header);
    case Modality::StateDiagram: return parse_state_diagram(block);
    default: throw Error(ErrorCode::InterpretationFailed, "no parser for this block kind");
  }
}

// ---- rendering ---------------------------------------------------------------

namespace {

// Direction used for rendering: Unknown signals follow the last-signal-is-output convention.
std::vector<Direction> resolved_directions(const Waveform& w) {
  std::vector<Direction> dirs;
  bool has_output = false;
  for (const auto& s : w.signals) has_output = has_output || s.direction == Direction::Output;
  for (size_t i = 0; i < w.signals.size(); ++i) {
    Direction d = w.signals[i].direction;
    if (d == Direction::Unknown) d = (!has_output && i + 1 == w.signals.size()) ? Direction::Output : Direction::Input;
    dirs.push_back(d);
  }
  return dirs;
}

std::string variables_line(const std::vector<std::pair<std::string, Direction>>& vars) {
  std::string out = "Variables: ";
  for (size_t i = 0; i < vars.size(); ++i) {
    if (i) out += "; ";
    out += std::to_string(i + 1) + ". " + vars[i].first + (vars[i].second == Direction::Output ? "(output)" : "(input)");
  }
  return out;
}

std::string render_table(const TruthTable& t) {
  std::vector<std::pair<std::string, Direction>> vars;
  for (const auto& n : t.inputs) vars.emplace_back(n, Direction::Input);
  for (const auto& n : t.outputs) vars.emplace_back(n, Direction::Output);
  std::string out = variables_line(vars) + "\nRules:\n";
  for (size_t r = 0; r < t.rows.size(); ++r) {
    const auto& row = t.rows[r];
    out += std::to_string(r + 1) + ". If ";
    for (size_t i = 0; i < t.inputs.size(); ++i) {
      if (i) out += ", ";
      out += t.inputs[i] + "=" + bit_text(row.in[i]);
    }
    out += ", then ";
    for (size_t o = 0; o < t.outputs.size(); ++o) {
      if (o) out += ", ";
      if (row.out[o] == Bit::DontCare)
        out += t.outputs[o] + " can be any value";
      else
        out += t.outputs[o] + " =" + bit_text(row.out[o]);
    }
    out += ";\n";
  }
  return out;
}

std::string render_wave(const Waveform& w) {
  auto dirs = resolved_directions(w);
  std::vector<std::pair<std::string, Direction>> vars;
  for (size_t i = 0; i < w.signals.size(); ++i) vars.emplace_back(w.signals[i].name, dirs[i]);
  std::string out = variables_line(vars) + "\nRules:\n";
  size_t len = w.signals.empty() ? 0 : w.signals[0].values.size();
  for (size_t k = 0; k < len; ++k) {
    if (w.time_axis)
      out += "When time is " + std::to_string((*w.time_axis)[k]) + w.time_unit;
    else
      out += "At step " + std::to_string(k + 1);
    for (const auto& s : w.signals) out += ", " + s.name + "=" + bit_text(s.values[k]);
    out += ";\n";
  }
  return out;
}

std::string render_diagram(const StateDiagram& d) {
  std::string out = "States&Outputs: ";
  for (size_t i = 0; i < d.states.size(); ++i) {
    if (i) out += "; ";
    out += std::to_string(i + 1) + ". state " + d.states[i].name + "(";
    for (size_t o = 0; o < d.states[i].outputs.size(); ++o) {
      if (o) out += ", ";
      out += d.states[i].outputs[o].first + "=" + bit_text(d.states[i].outputs[o].second);
    }
    out += ")";
  }
  out += "\nState transition:\n";
  for (size_t i = 0; i < d.states.size(); ++i) {
    out += std::to_string(i + 1) + ". From state " + d.states[i].name + ": ";
    bool first = true;
    for (const auto& t : d.transitions) {
      if (t.from != d.states[i].name) continue;
      if (!first) out += "; ";
      first = false;
      if (is_unconditional(t.condition)) {
        out += "Always transit to state " + t.to;
      } else if (auto simple = simple_condition(t.condition)) {
        out += "If " + simple->first + " = " + simple->second + ", then transit to state " + t.to;
      } else {
        out += "If " + t.condition + ", then transit to state " + t.to;
      }
    }
    out += "\n";
  }
  if (d.initial_state) out += "Initial state: " + *d.initial_state + "\n";
  return out;
}

}  // namespace

UniformInstruction render_uniform_instruction(const SymbolicSpec& spec) {
  UniformInstruction u;
  u.parse = spec;
  if (const auto* t = std::get_if<TruthTable>(&spec)) {
    u.text = render_table(*t);
    u.source_modality = Modality::TruthTable;
  } else if (const auto* w = std::get_if<Waveform>(&spec)) {
    u.text = render_wave(*w);
    u.source_modality = Modality::Waveform;
  } else {
    u.text = render_diagram(std::get<StateDiagram>(spec));
    u.source_modality = Modality::StateDiagram;
  }
  return u;
}

std::string format_truth_table(const TruthTable& t) {
  std::string out;
  auto join = [](const std::vector<std::string>& cells) {
    std::string s;
    for (size_t i = 0; i < cells.size(); ++i) s += (i ? " | " : "") + cells[i];
    return s;
  };
  bool multi = t.outputs.size() > 1;
  out += join(t.inputs) + (multi ? " || " : " | ") + join(t.outputs) + "\n";
  for (const auto& row : t.rows) {
    std::vector<std::string> in, o;
    for (Bit b : row.in) in.push_back(bit_text(b));
    for (Bit b : row.out) o.push_back(bit_text(b));
    out += join(in) + (multi ? " || " : " | ") + join(o) + "\n";
  }
  return out;
}

std::string format_waveform(const Waveform& w) {
  std::string out;
  for (const auto& s : w.signals) {
    out += s.name + ":";
    for (Bit b : s.values) out += " " + bit_text(b);
    out += "\n";
  }
  if (w.time_axis) {
    out += "time(" + w.time_unit + "):";
    for (auto t : *w.time_axis) out += " " + std::to_string(t);
    out += "\n";
  }
  return out;
}

std::string format_state_diagram(const StateDiagram& d) {
  std::string out;
  for (const auto& t : d.transitions) {
    const StateInfo* s = d.find_state(t.from);
    out += t.from + "[";
    for (size_t o = 0; s && o < s->outputs.size(); ++o) {
      if (o) out += ",";
      out += s->outputs[o].first + "=" + bit_text(s->outputs[o].second);
    }
    out += "]--[" + t.condition + "]->" + t.to + "\n";
  }
  return out;
}

IoSignature infer_signature(const SymbolicSpec& spec) {
  IoSignature sig;
  if (const auto* t = std::get_if<TruthTable>(&spec)) {
    for (const auto& n : t->inputs) sig.ports.push_back(Port{Direction::Input, n, 1});
    for (const auto& n : t->outputs) sig.ports.push_back(Port{Direction::Output, n, 1});
  } else if (const auto* w = std::get_if<Waveform>(&spec)) {
    auto dirs = resolved_directions(*w);
    for (size_t i = 0; i < w->signals.size(); ++i)
      if (dirs[i] == Direction::Input) sig.ports.push_back(Port{Direction::Input, w->signals[i].name, 1});
    for (size_t i = 0; i < w->signals.size(); ++i)
      if (dirs[i] == Direction::Output) sig.ports.push_back(Port{Direction::Output, w->signals[i].name, 1});
  } else {
    const auto& d = std::get<StateDiagram>(spec);
    std::vector<std::string> names = {"clk", "reset"};
    for (const auto& t : d.transitions)
      for (const auto& id : condition_identifiers(t.condition))
        if (std::find(names.begin(), names.end(), id) == names.end() &&
            std::find(d.output_names.begin(), d.output_names.end(), id) == d.output_names.end() && !d.find_state(id))
          names.push_back(id);
    for (const auto& n : names) sig.ports.push_back(Port{Direction::Input, n, 1});
    for (const auto& n : d.output_names) sig.ports.push_back(Port{Direction::Output, n, 1});
  }
  return sig;
}

std::string render_module_header(const IoSignature& sig) {
  std::string out = "module " + sig.module_name + "(";
  for (size_t i = 0; i < sig.ports.size(); ++i) {
    const auto& p = sig.ports[i];
    if (i) out += ", ";
    out += p.dir == Direction::Output ? "output " : "input ";
    if (p.width > 1) out += "[" + std::to_string(p.width - 1) + ":0] ";
    out += p.name;
  }
  return out + ");";
}

namespace {

struct HeaderMatch {
  size_t begin = 0, end = 0;  // header text span
  std::string name;
  std::string ports;  // text inside the port parentheses
  bool has_ports = false;
};

size_t skip_space(const std::string& t, size_t i) {
  while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
  return i;
}

// Index just past the ')' matching the '(' at i, or npos.
size_t match_paren(const std::string& t, size_t i) {
  int depth = 0;
  for (; i < t.size(); ++i) {
    if (t[i] == '(') ++depth;
    if (t[i] == ')' && --depth == 0) return i + 1;
  }
  return std::string::npos;
}

std::optional<HeaderMatch> find_header(const std::string& text) {
  size_t pos = 0;
  while ((pos = text.find("module", pos)) != std::string::npos) {
    size_t start = pos;
    pos += 6;
    if (start > 0 && (is_ident_char(text[start - 1]) || text[start - 1] == '$')) continue;
    if (pos < text.size() && is_ident_char(text[pos])) continue;
    size_t i = skip_space(text, pos);
    size_t name_start = i;
    if (i >= text.size() || !is_ident_start(text[i])) continue;
    while (i < text.size() && is_ident_char(text[i])) ++i;
    HeaderMatch m;
    m.begin = start;
    m.name = text.substr(name_start, i - name_start);
    i = skip_space(text, i);
    if (i < text.size() && text[i] == '#') {
      i = skip_space(text, i + 1);
      if (i >= text.size() || text[i] != '(') continue;
      i = match_paren(text, i);
      if (i == std::string::npos) continue;
      i = skip_space(text, i);
    }
    if (i < text.size() && text[i] == ';') {
      m.end = i + 1;
      return m;
    }
    if (i >= text.size() || text[i] != '(') continue;
    size_t close = match_paren(text, i);
    if (close == std::string::npos) continue;
    m.ports = text.substr(i + 1, close - i - 2);
    m.has_ports = true;
    i = skip_space(text, close);
    if (i < text.size() && text[i] == ';') {
      m.end = i + 1;
      return m;
    }
  }
  return std::nullopt;
}

}  // namespace

bool has_module_header(const std::string& text) { return find_header(text).has_value(); }

std::optional<std::string> extract_module_header(const std::string& text) {
  auto m = find_header(text);
  if (!m) return std::nullopt;
  return text.substr(m->begin, m->end - m->begin);
}

std::optional<IoSignature> parse_module_header(const std::string& text) {
  auto m = find_header(text);
  if (!m) return std::nullopt;
  IoSignature sig;
  sig.module_name = m->name;
  Direction dir = Direction::Unknown;
  int width = 1;
  std::string item;
  int depth = 0;
  std::vector<std::string> items;
  for (char c : m->ports) {
    if (c == '[' || c == '(') ++depth;
    if (c == ']' || c == ')') --depth;
    if (c == ',' && depth == 0) {
      items.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  if (!trim(item).empty()) items.push_back(item);
  static const std::regex range_re(R"(\[\s*(\d+)\s*:\s*(\d+)\s*\])");
  for (const auto& raw : items) {
    std::string it = raw;
    std::smatch rm;
    bool new_dir = false;
    std::vector<std::string> words;
    std::string rangeless = it;
    int item_width = -1;
    if (std::regex_search(it, rm, range_re)) {
      item_width = std::abs(std::stoi(rm[1].str()) - std::stoi(rm[2].str())) + 1;
      rangeless = rm.prefix().str() + " " + rm.suffix().str();
    }
    for (const auto& w : split_words(rangeless)) {
      if (w == "input") {
        dir = Direction::Input;
        new_dir = true;
      } else if (w == "output") {
        dir = Direction::Output;
        new_dir = true;
      } else if (w == "inout") {
        dir = Direction::Unknown;
        new_dir = true;
      } else if (w != "wire" && w != "reg" && w != "logic" && w != "signed" && w != "unsigned") {
        words.push_back(w);
      }
    }
    if (new_dir) width = item_width > 0 ? item_width : 1;
    else if (item_width > 0) width = item_width;
    if (words.empty()) continue;
    sig.ports.push_back(Port{dir, words.back(), width});
  }
  return sig;
}

std::string ensure_module_header(const std::string& instruction, const std::optional<IoSignature>& signature,
                                 const std::optional<SymbolicSpec>& parse) {
  if (has_module_header(instruction)) return instruction;
  IoSignature sig;
  if (signature) {
    sig = *signature;
  } else if (parse) {
    sig = infer_signature(*parse);
  } else {
    throw Error(ErrorCode::MissingSignature, "instruction has no module header and no signature can be inferred");
  }
  std::string out = instruction;
  if (!out.empty() && out.back() != '\n') out += "\n";
  out += "\nModule header:\n```verilog\n" + render_module_header(sig) + "\n```\n";
  return out;
}

}  // namespace haven
