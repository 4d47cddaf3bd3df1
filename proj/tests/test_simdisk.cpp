#include <list>
#include <random>

#include "doctest.h"
#include "gridio/simdisk.hpp"

using namespace gridio;

namespace {

/// Reads counted by a plain LRU of `cap` blocks over a block trace.
u64 lru_reads(const std::vector<u64>& trace, u64 cap) {
  std::list<u64> lru;
  u64 reads = 0;
  for (u64 b : trace) {
    auto it = std::find(lru.begin(), lru.end(), b);
    if (it != lru.end()) {
      lru.erase(it);
    } else {
      ++reads;
      if (lru.size() == cap) lru.pop_back();
    }
    lru.push_front(b);
  }
  return reads;
}

std::vector<std::byte> bytes(u64 n, u8 fill = 1) { return std::vector<std::byte>(n, std::byte{fill}); }

}  // namespace

TEST_SUITE("simdisk") {
  TEST_CASE("open_file") {
    SimDisk sim(SimConfig{16, 256});
    FileId f = sim.open_file("input");
    CHECK(sim.length(f) == 0);
    CHECK_THROWS_AS(sim.open_file("input"), IoError);
    sim.write(f, 0, bytes(1));
    CHECK(sim.length(f) == 16);
  }

  TEST_CASE("config validation") {
    CHECK_THROWS(SimDisk(SimConfig{24, 1024}));
    CHECK_THROWS(SimDisk(SimConfig{64, 1024}));  // 1024 < 64^2
    CHECK_NOTHROW(SimDisk(SimConfig{32, 1024}));
  }

  TEST_CASE("access_block classification and hits") {
    SimDisk sim(SimConfig{16, 256});
    FileId f = sim.open_file("a");
    sim.set_raw(f, bytes(48));
    for (u64 b : {0, 1, 2}) sim.access_block(f, b, Access::read);
    auto c = sim.counters();
    CHECK(c.blocks_read == 3);
    CHECK(c.sequential_blocks == 3);
    CHECK(c.random_blocks == 0);

    SimDisk s2(SimConfig{16, 256});
    FileId g = s2.open_file("b");
    s2.set_raw(g, bytes(16));
    s2.access_block(g, 0, Access::read);
    s2.access_block(g, 0, Access::read);
    CHECK(s2.counters().blocks_read == 1);
  }

  TEST_CASE("LRU trace against an independent model") {
    // two cache blocks: B = 2, M = 4
    SimDisk sim(SimConfig{2, 4});
    FileId f = sim.open_file("a");
    sim.set_raw(f, bytes(8));
    std::vector<u64> trace{0, 1, 2, 0};
    for (u64 b : trace) sim.access_block(f, b, Access::read);
    CHECK(sim.counters().blocks_read == lru_reads(trace, 2));
    CHECK(sim.counters().blocks_read == 4);

    std::mt19937_64 rng(5);
    SimDisk big(SimConfig{16, 256});
    FileId h = big.open_file("h");
    big.set_raw(h, bytes(16 * 64));
    std::vector<u64> t2;
    for (int i = 0; i < 2000; ++i) t2.push_back(rng() % 40);
    for (u64 b : t2) big.access_block(h, b, Access::read);
    CHECK(big.counters().blocks_read == lru_reads(t2, 16));
    CHECK(big.cached_blocks() <= 16);
  }

  TEST_CASE("counters") {
    SimDisk sim(SimConfig{16, 256});
    CHECK(sim.counters() == IoCounters{});
    FileId f = sim.open_file("a");
    sim.set_raw(f, bytes(100));
    sim.access_block(f, 0, Access::read);
    CHECK(sim.counters().blocks_read == 1);
    CHECK(sim.counters().bytes_transferred == 16);
  }

  TEST_CASE("scan costs ceil(n/B) reads whatever the cache holds") {
    for (u64 n : {1, 15, 16, 17, 1000}) {
      SimDisk sim(SimConfig{16, 256});
      FileId f = sim.open_file("a");
      sim.set_raw(f, bytes(n));
      // warm part of the cache first
      for (u64 b = 0; b < std::min<u64>(3, (n + 15) / 16); ++b) sim.access_block(f, b, Access::read);
      sim.reset_counters();
      SeqReader r(sim, f);
      std::vector<std::byte> buf(n);
      r.read(buf);
      u64 blocks = (n + 15) / 16;
      CHECK(sim.counters().blocks_read == blocks);
      CHECK(sim.counters().bytes_transferred == blocks * 16);
    }
  }

  TEST_CASE("property: counter identity, capacity and replayability") {
    auto run = [](u64 seed) {
      std::mt19937_64 rng(seed);
      SimDisk sim(SimConfig{16, 256});
      FileId a = sim.open_file("a"), b = sim.open_file("b");
      sim.set_raw(a, bytes(16 * 50));
      for (int i = 0; i < 3000; ++i) {
        u64 blk = rng() % 50, off = blk * 16 + rng() % 16;
        switch (rng() % 4) {
          case 0: sim.access_block(a, blk, Access::read); break;
          case 1: sim.write(b, off, bytes(rng() % 40 + 1)); break;
          case 2: {
            std::vector<std::byte> out(rng() % 30 + 1);
            if (off + out.size() <= sim.length(a)) sim.read(a, off, out);
            break;
          }
          default: sim.access_block(b, blk, Access::write, bytes(16)); break;
        }
        auto c = sim.counters();
        REQUIRE(c.bytes_transferred == 16 * (c.blocks_read + c.blocks_written));
        REQUIRE(sim.cached_blocks() <= 16);
      }
      sim.flush();
      return sim.counters();
    };
    for (u64 seed = 0; seed < 5; ++seed) CHECK(run(seed) == run(seed));
  }

  TEST_CASE("write fetches only on partial writes to existing blocks") {
    SimDisk sim(SimConfig{16, 256});
    FileId f = sim.open_file("a");
    sim.write(f, 0, bytes(5));  // new block: nothing to fetch
    CHECK(sim.counters().blocks_read == 0);
    sim.discard(f, 0, 0);
    sim.write(f, 3, bytes(2));  // existing, partial
    CHECK(sim.counters().blocks_read == 1);
    sim.write(f, 16, bytes(16));  // whole block
    CHECK(sim.counters().blocks_read == 1);
  }

  TEST_CASE("stack") {
    SimDisk sim(SimConfig{16, 256});
    FileStack st(sim, "s");
    std::byte a{1}, b{2};
    st.push(std::span(&a, 1));
    st.push(std::span(&b, 1));
    CHECK(st.pop(1)[0] == b);
    CHECK(st.pop(1)[0] == a);
    CHECK_THROWS_AS(st.pop(1), IoError);

    FileStack r(sim, "r");
    ByteWriter w;
    w.put(u64(7));
    r.push_record(w.bytes);
    r.push_record({});
    CHECK(r.pop_record().empty());
    CHECK(ByteReader(r.pop_record()).get<u64>() == 7);
    CHECK(r.empty());
  }

  TEST_CASE("stack traffic for small records") {
    // k records of B/4 bytes, pushed then popped, with a cache far smaller than the stack
    SimDisk sim(SimConfig{16, 256});
    FileStack st(sim, "s");
    const u64 k = 400;
    for (u64 i = 0; i < k; ++i) st.push(bytes(4, u8(i)));
    for (u64 i = k; i-- > 0;) REQUIRE(st.pop(4)[0] == std::byte(u8(i)));
    sim.flush();
    u64 bound = (k + 3) / 4 + 1;
    CHECK(sim.counters().blocks_written <= bound);
    CHECK(sim.counters().blocks_read <= bound);
  }

  TEST_CASE("seq writer round trip") {
    SimDisk sim(SimConfig{16, 256});
    FileId f = sim.open_file("a");
    {
      SeqWriter w(sim, f);
      for (u64 i = 0; i < 100; ++i) w.put(i);
    }
    CHECK(sim.counters().blocks_written == 50);
    CHECK(sim.counters().random_blocks == 0);
    SeqReader r(sim, f);
    for (u64 i = 0; i < 100; ++i) REQUIRE(r.get<u64>() == i);
  }
}
