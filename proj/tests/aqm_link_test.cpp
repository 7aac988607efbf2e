#include <gtest/gtest.h>

#include <vector>

#include "submss/aqm_queue.hpp"
#include "submss/link.hpp"

using namespace submss;

namespace {

constexpr std::int64_t kRate = 40'000'000;

AqmConfig ramp(AqmPolicy policy = AqmPolicy::ramp_mark, std::int64_t buffer = 100'000) {
  return AqmConfig{kRate, buffer, policy, SimTime::ms(5), SimTime::ms(10)};
}

Packet frame(std::uint32_t flow, std::int64_t seq, bool ecn = true, std::int64_t size = 1518) {
  Packet p;
  p.flow_id = flow;
  p.seq_bytes = seq;
  p.payload = size - 58;
  p.size = size;
  p.ecn_capable = ecn;
  return p;
}

// Fills the queue to at least `bytes` with ECN frames, which are never
// dropped below the buffer limit.
void fill(AqmQueue& q, std::int64_t bytes) {
  std::int64_t seq = 0;
  while (q.backlog() < bytes) {
    q.enqueue(frame(99, seq), SimTime::zero());
    seq += 1460;
  }
}

}  // namespace

TEST(SerializationTime, FrameAt40Mbps) {
  // 1518 * 8 / 40e6 s = 303.6 us
  EXPECT_EQ(serialization_time(1518, kRate), SimTime::ns(303'600));
}

TEST(SerializationTime, RoundsHalfUp) {
  // 1 byte at 3 b/s = 8/3 s = 2666666666.67 ns
  EXPECT_EQ(serialization_time(1, 3), SimTime::ns(2'666'666'667));
  // 1 byte at 16 Gb/s = 0.5 ns -> 1
  EXPECT_EQ(serialization_time(1, 16'000'000'000), SimTime::ns(1));
}

TEST(AqmQueue, DelayFromBacklog) {
  AqmQueue q(ramp(), RngStream(1, 0));
  EXPECT_EQ(q.queue_delay(), SimTime::zero());
  // Independent of the queue: bytes * 8 / rate.
  auto delay_of = [](std::int64_t bytes) { return SimTime::ns(bytes * 8 * 1'000'000'000 / kRate); };
  EXPECT_EQ(delay_of(30'000), SimTime::ms(6));
  EXPECT_EQ(delay_of(15'000), SimTime::ms(3));
  fill(q, 30'000);
  EXPECT_EQ(q.queue_delay(), delay_of(q.backlog()));
}

TEST(AqmQueue, BelowTargetQueuesUnmarked) {
  AqmQueue q(ramp(), RngStream(1, 0));
  fill(q, 20'000);  // 4 ms
  EXPECT_EQ(q.signal_probability(), 0.0);
  EXPECT_EQ(q.enqueue(frame(0, 0), SimTime::zero()), Disposition::queued);
  EXPECT_EQ(q.total_marks(), 0u);
}

TEST(AqmQueue, AboveCeilingAlwaysMarksEcn) {
  AqmQueue q(ramp(), RngStream(1, 0));
  fill(q, 50'000);  // 10 ms
  EXPECT_EQ(q.signal_probability(), 1.0);
  for (int i = 0; i < 10; ++i) {
    EXPECT_EQ(q.enqueue(frame(0, i * 1460), SimTime::zero()), Disposition::queued_marked);
  }
  EXPECT_TRUE(q.flow_counters()[0].marked == 10);
}

TEST(AqmQueue, AboveCeilingDropsNonEcnAndUnderRedDrop) {
  AqmQueue q(ramp(), RngStream(1, 0));
  fill(q, 50'000);
  EXPECT_EQ(q.enqueue(frame(0, 0, false), SimTime::zero()), Disposition::dropped);

  // Below target red-drop neither drops nor marks.
  AqmQueue r(ramp(AqmPolicy::red_drop), RngStream(1, 0));
  std::int64_t seq = 0;
  while (r.backlog() + 1518 <= 25'000) {
    ASSERT_NE(r.enqueue(frame(0, seq), SimTime::zero()), Disposition::dropped);
    seq += 1460;
  }
  EXPECT_EQ(r.total_marks(), 0u);
}

TEST(AqmQueue, FullBufferDropsUnderEveryPolicy) {
  for (auto policy : {AqmPolicy::drop_tail, AqmPolicy::red_drop, AqmPolicy::ramp_mark}) {
    AqmConfig c{kRate, 30'000, policy, SimTime::ms(5), SimTime::ms(1000)};
    AqmQueue q(c, RngStream(1, 0));
    std::int64_t seq = 0;
    while (q.backlog() + 1518 <= c.buffer_limit) {
      q.enqueue(frame(0, seq), SimTime::zero());
      seq += 1460;
    }
    // Top up with small packets so the buffer is exactly full.
    while (q.backlog() < c.buffer_limit) {
      Packet p = frame(0, seq, true, std::min<std::int64_t>(100, c.buffer_limit - q.backlog()));
      if (q.enqueue(p, SimTime::zero()) == Disposition::dropped) break;
      seq += p.payload;
    }
    const auto before = q.total_drops();
    EXPECT_EQ(q.enqueue(frame(0, seq), SimTime::zero()), Disposition::dropped) << to_string(policy);
    EXPECT_EQ(q.total_drops(), before + 1);
    EXPECT_LE(q.backlog(), c.buffer_limit);
  }
}

TEST(AqmQueue, SignalProbabilityMonotoneInDelay) {
  AqmQueue q(ramp(AqmPolicy::ramp_mark, 200'000), RngStream(1, 0));
  double prev = -1;
  std::int64_t seq = 0;
  while (q.backlog() < 70'000) {
    const double p = q.signal_probability();
    EXPECT_GE(p, prev);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    prev = p;
    q.enqueue(frame(0, seq), SimTime::zero());
    seq += 1460;
  }
  EXPECT_EQ(prev, 1.0);
}

TEST(AqmQueue, EcnFlowsOnlyLoseAtBufferLimit) {
  AqmQueue q(ramp(AqmPolicy::ramp_mark, 60'000), RngStream(3, 0));
  std::int64_t seq = 0;
  for (int i = 0; i < 200; ++i) {
    const bool room = q.backlog() + 1518 <= 60'000;
    const auto d = q.enqueue(frame(0, seq), SimTime::zero());
    EXPECT_EQ(d == Disposition::dropped, !room);
    seq += 1460;
    if (i % 3 == 0 && !q.empty()) q.pop_front();
  }
}

TEST(AqmQueue, ConfigRejectsBufferBelowTarget) {
  EXPECT_THROW(AqmQueue(AqmConfig{kRate, 25'000, AqmPolicy::ramp_mark, SimTime::ms(5),
                                  SimTime::ms(10)},
                        RngStream(1, 0)),
               std::invalid_argument);
}

TEST(AqmQueue, PerFlowConservation) {
  AqmQueue q(ramp(AqmPolicy::red_drop, 40'000), RngStream(5, 0));
  std::int64_t seq = 0;
  for (int i = 0; i < 2000; ++i) {
    q.enqueue(frame(static_cast<std::uint32_t>(i % 3), seq, i % 2 == 0), SimTime::zero());
    seq += 1460;
    if (i % 2 == 0 && !q.empty()) q.pop_front();
  }
  std::uint64_t total_drops = 0;
  for (const auto& c : q.flow_counters()) {
    EXPECT_EQ(c.offered, c.accepted + c.dropped);
    EXPECT_EQ(c.accepted, c.departed + c.in_backlog);
    total_drops += c.dropped;
  }
  EXPECT_EQ(total_drops, q.total_drops());
  EXPECT_GT(q.total_drops(), 0u);
}

TEST(Bottleneck, DeliversInFifoOrderAfterSerializationAndPropagation) {
  Engine e;
  std::vector<std::pair<std::int64_t, SimTime>> got;
  Bottleneck link(e, AqmQueue(ramp(), RngStream(1, 0)), SimTime::us(500),
                  [&](const Packet& p) { got.emplace_back(p.seq_bytes, e.now()); });
  link.enqueue(frame(0, 0));
  link.enqueue(frame(0, 1460));
  EXPECT_EQ(link.queue_delay(), serialization_time(2 * 1518, kRate));
  e.run_until(SimTime::s(1));
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].first, 0);
  EXPECT_EQ(got[1].first, 1460);
  EXPECT_EQ(got[0].second, SimTime::ns(303'600 + 500'000));
  EXPECT_EQ(got[1].second, SimTime::ns(2 * 303'600 + 500'000));
}

TEST(Bottleneck, EmptyQueueSchedulesNothing) {
  Engine e;
  Bottleneck link(e, AqmQueue(ramp(), RngStream(1, 0)), SimTime::us(500), [](const Packet&) {});
  EXPECT_EQ(e.pending_count(), 0u);
  EXPECT_FALSE(link.busy());
}

TEST(Bottleneck, NeverIdleWithBacklog) {
  Engine e;
  Bottleneck link(e, AqmQueue(ramp(AqmPolicy::drop_tail), RngStream(1, 0)), SimTime::us(500),
                  [](const Packet&) {});
  bool violated = false;
  for (int i = 0; i < 40; ++i) {
    e.schedule(SimTime::us(i * 150), {0, EventKind::control}, [&, i] {
      link.enqueue(frame(0, i * 1460));
    });
  }
  for (int k = 0; k < 2000; ++k) {
    e.schedule(SimTime::us(k * 7 + 3), {0, EventKind::sample}, [&] {
      if (link.queue().backlog() > 0 && !link.busy()) violated = true;
    });
  }
  e.run_until(SimTime::s(1));
  EXPECT_FALSE(violated);
  EXPECT_EQ(link.queue().backlog(), 0);
}

TEST(ReturnPath, DropsAcksDuringOutage) {
  Engine e;
  std::vector<SimTime> got;
  ReturnPath path(e, SimTime::us(500), [&](const Ack&) { got.push_back(e.now()); });
  path.sever(SimTime::ms(10), SimTime::ms(20));
  for (int t : {5, 10, 15, 20, 25}) {
    e.schedule(SimTime::ms(t), {0, EventKind::control}, [&] { path.send(Ack{}); });
  }
  e.run_until(SimTime::s(1));
  EXPECT_EQ(got, (std::vector<SimTime>{SimTime::us(5500), SimTime::us(20500), SimTime::us(25500)}));
  EXPECT_EQ(path.lost(), 2u);
}
