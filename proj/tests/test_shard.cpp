#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "holobrace/shard.hpp"

using namespace holobrace;
namespace fs = std::filesystem;

namespace {

LiftContext ctx_for(const std::string& desc) {
  return LiftContext::build(group_from_descriptor(desc), std::nullopt, EngineOptions{});
}

std::string run_pipeline(const LiftContext& ctx, size_t jobs) {
  ShardFile cur;
  cur.group_desc = group_descriptor(ctx.group);
  cur.series_fp = ctx.series_fingerprint();
  cur.layer = 0;
  cur.records.push_back(encode_record(ctx.pcgs, full_record(ctx.pcgs)));
  for (size_t t = 1; t <= ctx.layer_count(); ++t) {
    std::vector<ShardFile> outs;
    for (ShardFile& part : split_shard(cur, jobs)) outs.push_back(run_job(ctx, part, t));
    cur = merge_shards(outs);
  }
  return shard_to_string(cur);
}

}  // namespace

TEST_CASE("record encoding examples") {
  LiftContext ctx = ctx_for("2,4");
  SubgroupRecord trivial = igs(ctx.pcgs, {});
  CHECK(encode_record(ctx.pcgs, trivial) == "0:");
  // A single igs row equal to the first pcgs generator encodes as "1:1".
  SubgroupRecord first = record_from_canonical_rows(ctx.pcgs, {1});
  CHECK(encode_record(ctx.pcgs, first) == "1:1");
  // Mixed-radix packing: value = e_0 + p_0*(e_1 + p_1*(e_2 + ...)).
  LiftContext c9 = ctx_for("9");
  const auto& rel = c9.pcgs.relative_orders();
  std::vector<unsigned> e(rel.size(), 0);
  e[0] = 1;
  e[1] = rel[1] - 1;
  uint64_t expect = 0;
  for (size_t j = rel.size(); j-- > 0;) expect = expect * rel[j] + e[j];
  CHECK(c9.pcgs.id_from_exponents(e) == expect);
  CHECK(expect == 1 + rel[0] * (rel[1] - 1));
}

TEST_CASE("encode/decode roundtrip on random records") {
  std::mt19937 rng(77);
  for (const char* desc : {"2,4", "8", "9"}) {
    LiftContext ctx = ctx_for(desc);
    for (int trial = 0; trial < 400; ++trial) {
      std::vector<uint32_t> gens;
      for (int i = 0; i < 1 + int(rng() % 3); ++i)
        gens.push_back(rng() % ctx.pcgs.group_order());
      SubgroupRecord rec = igs(ctx.pcgs, gens);
      SubgroupRecord back = decode_record(ctx.pcgs, encode_record(ctx.pcgs, rec));
      CHECK(back.row_ids == rec.row_ids);
      CHECK(back.key == rec.key);
      CHECK(back.order == rec.order);
    }
  }
}

TEST_CASE("decode rejects malformed and non-canonical lines") {
  LiftContext ctx = ctx_for("2,4");
  CHECK_THROWS(decode_record(ctx.pcgs, "garbage"));
  CHECK_THROWS(decode_record(ctx.pcgs, "2:1"));          // count mismatch
  CHECK_THROWS(decode_record(ctx.pcgs, "1:999999999"));  // radix overflow
  CHECK_THROWS(decode_record(ctx.pcgs, "1:0"));          // identity row is not canonical
}

TEST_CASE("split sizes and concatenation invariant") {
  ShardFile s;
  s.group_desc = "4";
  s.series_fp = "0";
  s.layer = 1;
  for (int i = 0; i < 10; ++i) s.records.push_back(std::to_string(i));
  auto parts = split_shard(s, 3);
  CHECK(parts.size() == 3);
  CHECK(parts[0].records.size() == 4);
  CHECK(parts[1].records.size() == 3);
  CHECK(parts[2].records.size() == 3);
  std::vector<std::string> cat;
  for (auto& p : parts) cat.insert(cat.end(), p.records.begin(), p.records.end());
  CHECK(cat == s.records);

  auto one = split_shard(s, 1);
  CHECK(one.size() == 1);
  CHECK(one[0].records == s.records);

  // More jobs than records produces empty-bodied shards.
  auto many = split_shard(s, 15);
  CHECK(many.size() == 15);
  size_t total = 0;
  for (auto& p : many) total += p.records.size();
  CHECK(total == 10);
}

TEST_CASE("merge requires matching headers and collapses duplicates") {
  ShardFile a, b;
  a.group_desc = b.group_desc = "4";
  a.series_fp = b.series_fp = "abc";
  a.layer = b.layer = 2;
  a.records = {"1:4", "2:2,8"};
  b.records = {"1:4", "1:2"};
  ShardFile m = merge_shards({a, b});
  CHECK(m.records == std::vector<std::string>{"1:2", "1:4", "2:2,8"});

  ShardFile c = b;
  c.layer = 3;
  CHECK_THROWS(merge_shards({a, c}));
  ShardFile d = b;
  d.series_fp = "zzz";
  CHECK_THROWS(merge_shards({a, d}));
}

TEST_CASE("shard file io roundtrip and header") {
  LiftContext ctx = ctx_for("4");
  ShardFile s;
  s.group_desc = "4";
  s.series_fp = ctx.series_fingerprint();
  s.layer = 1;
  s.records = {"1:2", "1:4"};
  std::string path = (fs::temp_directory_path() / "holobrace_test.shard").string();
  write_shard(path, s);
  std::ifstream f(path, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  CHECK(text == "HBL1 4 " + s.series_fp + " layer=1 n=2\n1:2\n1:4\n");
  CHECK(text.back() == '\n');
  ShardFile back = read_shard(path);
  CHECK(back.records == s.records);
  CHECK(back.layer == 1);
  fs::remove(path);
}

TEST_CASE("run_job: empty shard, determinism, fingerprint checking") {
  LiftContext ctx = ctx_for("4");
  ShardFile empty;
  empty.group_desc = "4";
  empty.series_fp = ctx.series_fingerprint();
  empty.layer = 0;
  ShardFile out = run_job(ctx, empty, 1);
  CHECK(out.records.empty());
  CHECK(out.layer == 1);

  ShardFile bad = empty;
  bad.series_fp = "deadbeefdeadbeef";
  CHECK_THROWS(run_job(ctx, bad, 1));
  CHECK_THROWS(run_job(ctx, empty, 2));  // layer mismatch

  // Re-running produces byte-identical output.
  ShardFile seed = empty;
  seed.records.push_back(encode_record(ctx.pcgs, full_record(ctx.pcgs)));
  std::string a = shard_to_string(run_job(ctx, seed, 1));
  std::string b = shard_to_string(run_job(ctx, seed, 1));
  CHECK(a == b);
}

TEST_CASE("shard-count independence") {
  for (const char* desc : {"4", "2,4", "9"}) {
    LiftContext ctx = ctx_for(desc);
    std::string base = run_pipeline(ctx, 1);
    for (size_t k : {2, 3, 5}) CHECK(run_pipeline(ctx, k) == base);
  }
}

TEST_CASE("context round trip") {
  std::string dir = (fs::temp_directory_path() / "holobrace_ctx_test").string();
  fs::remove_all(dir);
  LiftContext ctx = ctx_for("2,4");
  write_context(dir, ctx);
  LiftContext back = load_context(dir, EngineOptions{});
  CHECK(back.series_fingerprint() == ctx.series_fingerprint());
  CHECK(back.layer_count() == ctx.layer_count());
  CHECK(back.kernel_classes.size() == ctx.kernel_classes.size());
  for (size_t t = 1; t <= ctx.layer_count(); ++t) {
    CHECK(back.kernel_classes[t].size() == ctx.kernel_classes[t].size());
    for (size_t i = 0; i < ctx.kernel_classes[t].size(); ++i)
      CHECK(back.kernel_classes[t][i].key == ctx.kernel_classes[t][i].key);
  }
  fs::remove_all(dir);
}

TEST_CASE("crash resume: re-running any deleted job reproduces the merge") {
  LiftContext ctx = ctx_for("2,4");
  ShardFile seed;
  seed.group_desc = "2,4";
  seed.series_fp = ctx.series_fingerprint();
  seed.layer = 0;
  seed.records.push_back(encode_record(ctx.pcgs, full_record(ctx.pcgs)));
  ShardFile l1 = run_job(ctx, seed, 1);
  auto parts = split_shard(l1, 3);
  std::vector<ShardFile> outs;
  for (auto& p : parts) outs.push_back(run_job(ctx, p, 2));
  ShardFile merged = merge_shards(outs);
  // "Delete" job 1 and recompute it.
  outs[1] = run_job(ctx, parts[1], 2);
  CHECK(shard_to_string(merge_shards(outs)) == shard_to_string(merged));
}
