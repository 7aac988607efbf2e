#ifndef SUBMSS_PACKET_HPP
#define SUBMSS_PACKET_HPP

#include <cstdint>

#include "submss/sim_time.hpp"

namespace submss {

// A data segment as it appears on the wire.
struct Packet {
  std::uint32_t flow_id = 0;
  std::int64_t seq_bytes = 0;  // offset of the first payload byte
  std::int64_t payload = 0;    // TCP payload bytes
  std::int64_t size = 0;       // frame size, headers included
  bool ecn_capable = false;
  bool ce_marked = false;
  bool is_retransmission = false;
  SimTime sent_at;

  std::int64_t end_seq() const { return seq_bytes + payload; }
};

// Cumulative acknowledgement travelling on the (uncongested) return path.
struct Ack {
  std::uint32_t flow_id = 0;
  std::int64_t ack_no = 0;  // next byte expected
  bool ece = false;
};

}  // namespace submss

#endif  // SUBMSS_PACKET_HPP
