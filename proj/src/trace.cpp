#include "flexgc/trace.hpp"

#include <cctype>
#include <istream>
#include <ostream>
#include <sstream>

namespace flexgc {

TraceEvent TraceEvent::alloc(int64_t id, int64_t bytes, bool zeroed) {
  TraceEvent ev;
  ev.kind = Kind::Alloc;
  ev.block_id = id;
  ev.bytes = bytes;
  ev.zeroed = zeroed;
  return ev;
}

TraceEvent TraceEvent::write(int64_t id, int64_t offset, int64_t width,
                             ValueKind vk) {
  TraceEvent ev;
  ev.kind = Kind::Write;
  ev.block_id = id;
  ev.offset = offset;
  ev.width = width;
  ev.value_kind = vk;
  return ev;
}

TraceEvent TraceEvent::read(int64_t id, int64_t offset, int64_t width) {
  TraceEvent ev;
  ev.kind = Kind::Read;
  ev.block_id = id;
  ev.offset = offset;
  ev.width = width;
  return ev;
}

TraceEvent TraceEvent::realloc(int64_t id, int64_t new_bytes) {
  TraceEvent ev;
  ev.kind = Kind::Realloc;
  ev.block_id = id;
  ev.bytes = new_bytes;
  return ev;
}

TraceEvent TraceEvent::free(int64_t id) {
  TraceEvent ev;
  ev.kind = Kind::Free;
  ev.block_id = id;
  return ev;
}

std::string format_trace_event(const TraceEvent& ev) {
  std::ostringstream out;
  switch (ev.kind) {
    case TraceEvent::Kind::Alloc:
      out << "A " << ev.block_id << ' ' << ev.bytes << ' '
          << (ev.zeroed ? 'c' : 'm');
      break;
    case TraceEvent::Kind::Write: {
      char vk = ev.value_kind == TraceEvent::ValueKind::HeapRef ? 'r'
                : ev.value_kind == TraceEvent::ValueKind::Null  ? 'n'
                                                                : 'o';
      out << "W " << ev.block_id << ' ' << ev.offset << ' ' << ev.width << ' '
          << vk;
      break;
    }
    case TraceEvent::Kind::Read:
      out << "R " << ev.block_id << ' ' << ev.offset << ' ' << ev.width;
      break;
    case TraceEvent::Kind::Realloc:
      out << "X " << ev.block_id << ' ' << ev.bytes;
      break;
    case TraceEvent::Kind::Free:
      out << "F " << ev.block_id;
      break;
  }
  return out.str();
}

void TraceWriter::on_event(const TraceEvent& ev) {
  out_ << format_trace_event(ev) << '\n';
}

namespace {

int64_t parse_int(const std::string& tok, int64_t line) {
  size_t pos = 0;
  int64_t value = 0;
  try {
    value = std::stoll(tok, &pos);
  } catch (const std::exception&) {
    throw TraceError("expected integer, got '" + tok + "'", line);
  }
  if (pos != tok.size()) {
    throw TraceError("expected integer, got '" + tok + "'", line);
  }
  return value;
}

}  // namespace

std::optional<TraceEvent> parse_trace_line(const std::string& line,
                                           int64_t line_number) {
  std::istringstream in(line);
  std::string op;
  if (!(in >> op)) return std::nullopt;  // blank
  if (op[0] == '#') return std::nullopt;

  std::vector<std::string> fields;
  std::string tok;
  while (in >> tok) fields.push_back(tok);

  auto want = [&](size_t n) {
    if (fields.size() != n) {
      throw TraceError("'" + op + "' expects " + std::to_string(n) +
                           " fields, got " + std::to_string(fields.size()),
                       line_number);
    }
  };

  if (op == "A") {
    want(3);
    if (fields[2] != "m" && fields[2] != "c") {
      throw TraceError("alloc mode must be 'm' or 'c', got '" + fields[2] + "'",
                       line_number);
    }
    return TraceEvent::alloc(parse_int(fields[0], line_number),
                             parse_int(fields[1], line_number),
                             fields[2] == "c");
  }
  if (op == "W") {
    want(4);
    TraceEvent::ValueKind vk;
    if (fields[3] == "r") {
      vk = TraceEvent::ValueKind::HeapRef;
    } else if (fields[3] == "n") {
      vk = TraceEvent::ValueKind::Null;
    } else if (fields[3] == "o") {
      vk = TraceEvent::ValueKind::Other;
    } else {
      throw TraceError("write value kind must be 'r', 'n' or 'o', got '" +
                           fields[3] + "'",
                       line_number);
    }
    return TraceEvent::write(parse_int(fields[0], line_number),
                             parse_int(fields[1], line_number),
                             parse_int(fields[2], line_number), vk);
  }
  if (op == "R") {
    want(3);
    return TraceEvent::read(parse_int(fields[0], line_number),
                            parse_int(fields[1], line_number),
                            parse_int(fields[2], line_number));
  }
  if (op == "X") {
    want(2);
    return TraceEvent::realloc(parse_int(fields[0], line_number),
                               parse_int(fields[1], line_number));
  }
  if (op == "F") {
    want(1);
    return TraceEvent::free(parse_int(fields[0], line_number));
  }
  throw TraceError("unknown event '" + op + "'", line_number);
}

std::vector<TraceEvent> read_trace(std::istream& in) {
  std::vector<TraceEvent> events;
  std::string line;
  int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (auto ev = parse_trace_line(line, line_number)) events.push_back(*ev);
  }
  return events;
}

}  // namespace flexgc
