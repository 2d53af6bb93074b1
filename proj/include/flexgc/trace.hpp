// Allocation-trace events and their line-oriented text format:
//
//   A <id> <bytes> <m|c>          block allocated (malloc-like / calloc-like)
//   W <id> <offset> <width> <r|n|o>   write of a heap ref / null / other
//   R <id> <offset> <width>      read
//   X <id> <new_bytes>           realloc
//   F <id>                       free
//
// '#' starts a comment line; fields are whitespace-separated decimals.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace flexgc {

struct TraceEvent {
  enum class Kind : uint8_t { Alloc, Write, Read, Realloc, Free };
  enum class ValueKind : uint8_t { HeapRef, Null, Other };

  Kind kind = Kind::Alloc;
  int64_t block_id = 0;
  int64_t bytes = 0;   // Alloc size or Realloc new size
  int64_t offset = 0;  // Write / Read
  int64_t width = 0;   // Write / Read
  bool zeroed = false; // Alloc
  ValueKind value_kind = ValueKind::Other;  // Write

  static TraceEvent alloc(int64_t id, int64_t bytes, bool zeroed);
  static TraceEvent write(int64_t id, int64_t offset, int64_t width,
                          ValueKind vk);
  static TraceEvent read(int64_t id, int64_t offset, int64_t width);
  static TraceEvent realloc(int64_t id, int64_t new_bytes);
  static TraceEvent free(int64_t id);
};

// Malformed trace text or an event that breaks block bookkeeping (unknown
// id, double free, out-of-bounds access). Carries the 1-based line number
// when the event came from a file.
class TraceError : public std::runtime_error {
 public:
  TraceError(const std::string& what, int64_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line_(line) {}
  int64_t line() const { return line_; }

 private:
  int64_t line_;
};

// Receiver of runtime-emitted events.
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_event(const TraceEvent& ev) = 0;
};

// Formats events in the text format above, one per line.
class TraceWriter : public TraceSink {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}
  void on_event(const TraceEvent& ev) override;

 private:
  std::ostream& out_;
};

std::string format_trace_event(const TraceEvent& ev);

// Parses one line; returns nothing for comments and blank lines. Throws
// TraceError with the given line number on malformed input.
std::optional<TraceEvent> parse_trace_line(const std::string& line,
                                           int64_t line_number);

// Reads a whole trace stream; line numbers in errors are 1-based.
std::vector<TraceEvent> read_trace(std::istream& in);

}  // namespace flexgc
