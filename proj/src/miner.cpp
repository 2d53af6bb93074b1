#include "flexgc/miner.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

namespace flexgc {

const char* const kMinerCsvHeader =
    "used_bytes,supply_bytes,not_gradual_bytes,gradual_malloc,gradual_calloc,"
    "not_gradual_count,useless_calloc_count";

std::string MinerReport::to_csv() const {
  std::ostringstream out;
  out << kMinerCsvHeader << '\n'
      << used_bytes_gradual << ',' << supply_bytes_gradual << ','
      << bytes_not_gradual << ',' << gradual_malloc << ',' << gradual_calloc
      << ',' << not_gradual << ',' << useless_calloc_ids.size() << '\n';
  return out.str();
}

Miner::Miner(int64_t word_size) : word_size_(word_size) {
  if (word_size <= 0) throw TraceError("word size must be positive");
}

BlockState& Miner::block(int64_t id, int64_t line) {
  auto it = blocks_.find(id);
  if (it == blocks_.end()) {
    throw TraceError("unknown block id " + std::to_string(id), line);
  }
  return it->second;
}

void Miner::ingest(const TraceEvent& ev, int64_t line) {
  switch (ev.kind) {
    case TraceEvent::Kind::Alloc: {
      if (ev.bytes < 0) {
        throw TraceError("negative allocation size", line);
      }
      if (blocks_.count(ev.block_id)) {
        throw TraceError("block id " + std::to_string(ev.block_id) +
                             " is already live",
                         line);
      }
      BlockState state;
      state.bytes = ev.bytes;
      state.zeroed = ev.zeroed;
      blocks_.emplace(ev.block_id, state);
      break;
    }

    case TraceEvent::Kind::Write: {
      BlockState& b = block(ev.block_id, line);
      if (ev.offset < 0 || ev.width <= 0 || ev.offset + ev.width > b.bytes) {
        throw TraceError("access outside block bounds", line);
      }
      // Accesses that do not look like pointer-array traffic take the whole
      // block out of the analysis.
      if (ev.width != word_size_ || ev.offset % word_size_ != 0 ||
          ev.value_kind == TraceEvent::ValueKind::Other) {
        b.category = BlockState::Category::Excluded;
        break;
      }
      if (b.category == BlockState::Category::Excluded) break;
      int64_t slot = ev.offset / word_size_;
      if (slot == b.used_slots) {
        b.used_slots += 1;  // the Extend-shaped write
      } else if (slot > b.used_slots) {
        b.category = BlockState::Category::NotGradual;
      }
      // Writes below the watermark stay inside the used area.
      break;
    }

    case TraceEvent::Kind::Read: {
      BlockState& b = block(ev.block_id, line);
      if (ev.offset < 0 || ev.width <= 0 || ev.offset + ev.width > b.bytes) {
        throw TraceError("access outside block bounds", line);
      }
      if (ev.width != word_size_) {
        b.category = BlockState::Category::Excluded;
      }
      // Reads never move the watermark and never demote a candidate.
      break;
    }

    case TraceEvent::Kind::Realloc: {
      BlockState& b = block(ev.block_id, line);
      if (ev.bytes < 0) throw TraceError("negative realloc size", line);
      b.bytes = ev.bytes;
      // Shrinking below the watermark truncates it; growth exposes fresh
      // supply and changes nothing else.
      b.used_slots = std::min(b.used_slots, b.bytes / word_size_);
      break;
    }

    case TraceEvent::Kind::Free: {
      if (blocks_.erase(ev.block_id) == 0) {
        throw TraceError("free of unknown or already freed block " +
                             std::to_string(ev.block_id),
                         line);
      }
      break;
    }
  }
}

MinerReport Miner::finalize() const {
  MinerReport report;
  for (const auto& [id, b] : blocks_) {
    switch (b.category) {
      case BlockState::Category::Excluded:
        break;
      case BlockState::Category::NotGradual:
        report.bytes_not_gradual += b.bytes;
        report.not_gradual += 1;
        break;
      case BlockState::Category::CandidateGradual: {
        int64_t used = b.used_slots * word_size_;
        report.used_bytes_gradual += used;
        report.supply_bytes_gradual += b.bytes - used;
        if (b.zeroed) {
          report.gradual_calloc += 1;
          report.useless_calloc_ids.insert(id);
        } else {
          report.gradual_malloc += 1;
        }
        break;
      }
    }
  }
  return report;
}

MinerReport mine_trace(std::istream& in, int64_t word_size) {
  Miner miner(word_size);
  std::string line;
  int64_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (auto ev = parse_trace_line(line, line_number)) {
      miner.ingest(*ev, line_number);
    }
  }
  return miner.finalize();
}

}  // namespace flexgc
