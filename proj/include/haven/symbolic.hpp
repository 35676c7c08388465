#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace haven {

enum class Bit : uint8_t { Zero, One, DontCare };

char bit_char(Bit b);  // '0', '1', 'X'

struct TruthTable {
  struct Row {
    std::vector<Bit> in;
    std::vector<Bit> out;
    bool operator==(const Row&) const = default;
  };
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<Row> rows;

  bool operator==(const TruthTable&) const = default;
};

enum class Direction { Input, Output, Unknown };

struct WaveSignal {
  std::string name;
  std::vector<Bit> values;
  Direction direction = Direction::Unknown;
  bool operator==(const WaveSignal&) const = default;
};

struct Waveform {
  std::vector<WaveSignal> signals;
  std::optional<std::vector<int64_t>> time_axis;  // in time_unit
  std::string time_unit = "ns";

  bool operator==(const Waveform&) const = default;
};

struct StateInfo {
  std::string name;
  std::vector<std::pair<std::string, Bit>> outputs;  // in the diagram's output order
  bool operator==(const StateInfo&) const = default;
};

struct Transition {
  std::string from;
  std::string condition;  // as written, trimmed
  std::string to;
  bool operator==(const Transition&) const = default;
};

struct StateDiagram {
  std::vector<std::string> output_names;
  std::vector<StateInfo> states;  // first-appearance order
  std::vector<Transition> transitions;
  std::optional<std::string> initial_state;

  const StateInfo* find_state(const std::string& name) const;
  bool operator==(const StateDiagram&) const = default;
};

using SymbolicSpec = std::variant<TruthTable, Waveform, StateDiagram>;

enum class Modality { NaturalLanguageOnly, TruthTable, Waveform, StateDiagram, Mixed };

const char* to_string(Modality m);

struct Span {
  size_t begin = 0;  // byte offsets into the prompt, [begin, end)
  size_t end = 0;
  Modality kind = Modality::NaturalLanguageOnly;
  bool operator==(const Span&) const = default;
};

struct ModalityDetection {
  Modality kind = Modality::NaturalLanguageOnly;
  std::vector<Span> spans;
};

struct UniformInstruction {
  std::string text;
  Modality source_modality = Modality::NaturalLanguageOnly;
  std::optional<SymbolicSpec> parse;  // absent only for free-form LLM interpretations
};

struct Port {
  Direction dir = Direction::Input;
  std::string name;
  int width = 1;
  bool operator==(const Port&) const = default;
};

struct IoSignature {
  std::string module_name = "top_module";
  std::vector<Port> ports;
  bool operator==(const IoSignature&) const = default;
};

// Lexical scan for blocks that look symbolic. Candidates may still fail to
// parse (duplicate rows, ragged waveforms, dangling states).
std::vector<Span> scan_symbolic_blocks(const std::string& prompt);

// Candidates filtered to blocks that are structurally well formed: truth
// tables and waveforms must parse; state-diagram blocks must consist of
// grammatical edges (state completeness is checked by parse_state_diagram).
ModalityDetection detect_modality(const std::string& prompt);

TruthTable parse_truth_table(const std::string& block);
// `header` supplies port directions when a module header accompanies the prompt.
Waveform parse_waveform(const std::string& block, const std::optional<IoSignature>& header = std::nullopt);
StateDiagram parse_state_diagram(const std::string& block);

// Parses `block` with the parser for `kind` (TruthTable, Waveform or StateDiagram).
SymbolicSpec parse_block(const std::string& block, Modality kind,
                         const std::optional<IoSignature>& header = std::nullopt);

UniformInstruction render_uniform_instruction(const SymbolicSpec& spec);

// Block text in the accepted input syntax; parse_* of the result reproduces the value.
std::string format_truth_table(const TruthTable& table);
std::string format_waveform(const Waveform& wave);
std::string format_state_diagram(const StateDiagram& diagram);

// Ports implied by a parsed spec: 1-bit inputs and outputs in variable order;
// state diagrams add clk and reset ahead of their condition inputs.
IoSignature infer_signature(const SymbolicSpec& spec);

std::string render_module_header(const IoSignature& sig);

// True when text contains `module NAME ( ... );` (or `module NAME;`).
bool has_module_header(const std::string& text);
// Literal text of the first module header, from "module" through ';'.
std::optional<std::string> extract_module_header(const std::string& text);
// First ANSI-style module header in text, if any.
std::optional<IoSignature> parse_module_header(const std::string& text);

std::string ensure_module_header(const std::string& instruction, const std::optional<IoSignature>& signature,
                                 const std::optional<SymbolicSpec>& parse = std::nullopt);

}  // namespace haven
