#include "holobrace/shard.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace holobrace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string encode_record(const Pcgs& pcgs, const SubgroupRecord& rec) {
  (void)pcgs;
  std::string s = std::to_string(rec.row_ids.size()) + ":";
  for (size_t i = 0; i < rec.row_ids.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(rec.row_ids[i]);
  }
  return s;
}

namespace {

std::pair<size_t, std::vector<uint64_t>> parse_record_line(const std::string& line) {
  size_t colon = line.find(':');
  if (colon == std::string::npos) throw std::runtime_error("malformed record line: " + line);
  size_t count = 0;
  try {
    count = std::stoull(line.substr(0, colon));
  } catch (...) {
    throw std::runtime_error("malformed record count: " + line);
  }
  std::vector<uint64_t> vals;
  std::string rest = line.substr(colon + 1);
  if (!rest.empty()) {
    std::stringstream ss(rest);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) throw std::runtime_error("malformed record value: " + line);
      vals.push_back(std::stoull(tok));
    }
  }
  if (vals.size() != count) throw std::runtime_error("record count mismatch: " + line);
  return {count, vals};
}

}  // namespace

SubgroupRecord decode_record(const Pcgs& pcgs, const std::string& line) {
  auto [count, vals] = parse_record_line(line);
  (void)count;
  std::vector<uint32_t> ids;
  ids.reserve(vals.size());
  size_t prev_lead = 0;
  bool first = true;
  for (uint64_t v : vals) {
    if (v == 0) throw std::runtime_error("identity row in record line: " + line);
    if (v >= pcgs.group_order())
      throw std::runtime_error("record value overflows the pcgs radices: " + line);
    size_t lead = pcgs.lead(static_cast<uint32_t>(v));
    if (!first && lead <= prev_lead)
      throw std::runtime_error("record rows are not in echelon order: " + line);
    prev_lead = lead;
    first = false;
    ids.push_back(static_cast<uint32_t>(v));
  }
  SubgroupRecord rec = record_from_canonical_rows(pcgs, ids);
  if (rec.row_ids != ids) throw std::runtime_error("record line is not canonical: " + line);
  return rec;
}

std::string shard_to_string(const ShardFile& s) {
  std::string out = "HBL1 " + s.group_desc + " " + s.series_fp + " layer=" + std::to_string(s.layer) +
                    " n=" + std::to_string(s.records.size()) + "\n";
  for (const std::string& r : s.records) out += r + "\n";
  return out;
}

ShardFile shard_from_string(const std::string& text) {
  ShardFile s;
  std::stringstream ss(text);
  std::string header;
  if (!std::getline(ss, header)) throw std::runtime_error("empty shard file");
  std::stringstream hs(header);
  std::string magic, layer_kv, n_kv;
  if (!(hs >> magic >> s.group_desc >> s.series_fp >> layer_kv >> n_kv) || magic != "HBL1" ||
      layer_kv.rfind("layer=", 0) != 0 || n_kv.rfind("n=", 0) != 0)
    throw std::runtime_error("bad shard header: " + header);
  s.layer = std::stoull(layer_kv.substr(6));
  size_t n = std::stoull(n_kv.substr(2));
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    s.records.push_back(line);
  }
  if (s.records.size() != n)
    throw std::runtime_error("shard record count does not match header");
  return s;
}

void write_shard(const std::string& path, const ShardFile& s) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << shard_to_string(s);
  }
  fs::rename(tmp, path);
}

ShardFile read_shard(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return shard_from_string(buf.str());
}

std::vector<ShardFile> split_shard(const ShardFile& in, size_t k) {
  if (k < 1) throw std::invalid_argument("job count must be >= 1");
  std::vector<ShardFile> out(k);
  size_t base = in.records.size() / k, extra = in.records.size() % k;
  size_t pos = 0;
  for (size_t j = 0; j < k; ++j) {
    out[j].group_desc = in.group_desc;
    out[j].series_fp = in.series_fp;
    out[j].layer = in.layer;
    size_t take = base + (j < extra ? 1 : 0);
    for (size_t i = 0; i < take; ++i) out[j].records.push_back(in.records[pos++]);
  }
  return out;
}

ShardFile merge_shards(const std::vector<ShardFile>& shards) {
  if (shards.empty()) throw std::invalid_argument("nothing to merge");
  ShardFile out;
  out.group_desc = shards[0].group_desc;
  out.series_fp = shards[0].series_fp;
  out.layer = shards[0].layer;
  std::vector<std::pair<std::vector<uint64_t>, std::string>> keyed;
  for (const ShardFile& s : shards) {
    if (s.group_desc != out.group_desc || s.series_fp != out.series_fp || s.layer != out.layer)
      throw std::runtime_error("shard headers do not match");
    for (const std::string& line : s.records) {
      auto [count, vals] = parse_record_line(line);
      std::vector<uint64_t> key;
      key.reserve(vals.size() + 1);
      key.push_back(count);
      for (uint64_t v : vals) key.push_back(v);
      keyed.push_back({std::move(key), line});
    }
  }
  std::sort(keyed.begin(), keyed.end());
  for (size_t i = 0; i < keyed.size(); ++i)
    if (i == 0 || keyed[i].first != keyed[i - 1].first) out.records.push_back(keyed[i].second);
  return out;
}

std::string layer_shard_name(size_t t) {
  char buf[32];
  snprintf(buf, sizeof buf, "layer_%03zu.shard", t);
  return buf;
}

void write_context(const std::string& dir, const LiftContext& ctx) {
  fs::create_directories(dir);
  json j;
  j["format"] = "holobrace-ctx-1";
  j["group"] = group_descriptor(ctx.group);
  j["series_fp"] = ctx.series_fingerprint();
  j["engine"] = ctx.sylow_mode ? "sylow" : "hol";
  json members = json::array();
  for (const PermGroup& m : ctx.series.members) {
    json gens = json::array();
    for (const Perm& p : m.generators()) gens.push_back(p.img);
    if (m.generators().empty()) gens.push_back(Perm(ctx.pcgs.degree()).img);
    members.push_back(gens);
  }
  j["series_members"] = members;
  {
    std::string tmp = dir + "/ctx.json.tmp";
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << j.dump(1) << "\n";
    f.close();
    fs::rename(tmp, dir + "/ctx.json");
  }
  const std::string fp = ctx.series_fingerprint();
  for (size_t t = 1; t <= ctx.layer_count(); ++t) {
    ShardFile s;
    s.group_desc = group_descriptor(ctx.group);
    s.series_fp = fp;
    s.layer = t;
    for (const SubgroupRecord& rec : ctx.kernel_classes[t])
      s.records.push_back(encode_record(ctx.pcgs, rec));
    char name[32];
    snprintf(name, sizeof name, "kernel_%03zu.shard", t);
    write_shard(dir + "/" + name, s);
  }
  ShardFile seed;
  seed.group_desc = group_descriptor(ctx.group);
  seed.series_fp = fp;
  seed.layer = 0;
  seed.records.push_back(encode_record(ctx.pcgs, full_record(ctx.pcgs)));
  write_shard(dir + "/" + layer_shard_name(0), seed);
}

LiftContext load_context(const std::string& dir, const EngineOptions& opts) {
  std::ifstream f(dir + "/ctx.json", std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + dir + "/ctx.json");
  json j = json::parse(f);
  if (j.at("format") != "holobrace-ctx-1") throw std::runtime_error("unknown context format");
  AbelianGroup g = group_from_descriptor(j.at("group").get<std::string>());
  std::vector<std::vector<Perm>> members;
  for (const auto& gens : j.at("series_members")) {
    std::vector<Perm> ms;
    for (const auto& img : gens) ms.push_back(Perm(img.get<std::vector<uint8_t>>()));
    members.push_back(std::move(ms));
  }
  LiftContext ctx = LiftContext::build(g, members, opts);
  if (ctx.series_fingerprint() != j.at("series_fp").get<std::string>())
    throw std::runtime_error("context fingerprint mismatch; regenerate the context directory");
  if ((j.at("engine") == "sylow") != ctx.sylow_mode)
    throw std::runtime_error("context engine mode mismatch");
  return ctx;
}

RunResult full_run(const LiftContext& ctx, size_t jobs, const std::string& out_dir) {
  write_context(out_dir, ctx);
  RunResult res;
  res.stats.push_back({0, 1, 1});
  std::string cur = out_dir + "/" + layer_shard_name(0);
  for (size_t t = 1; t <= ctx.layer_count(); ++t) {
    ShardFile parents = read_shard(cur);
    auto parts = split_shard(parents, jobs);
    std::vector<ShardFile> outputs;
    for (size_t j = 0; j < parts.size(); ++j) {
      ShardFile out = run_job(ctx, parts[j], t);
      char buf[48];
      snprintf(buf, sizeof buf, "job_%03zu_%03zu.shard", t, j);
      write_shard(out_dir + "/" + buf, out);
      outputs.push_back(std::move(out));
    }
    ShardFile merged = merge_shards(outputs);
    std::string next = out_dir + "/" + layer_shard_name(t);
    write_shard(next, merged);
    res.stats.push_back({t, merged.records.size(), parts.size()});
    cur = next;
  }
  ShardFile final_shard = read_shard(cur);
  std::vector<SubgroupRecord> recs;
  for (const std::string& line : final_shard.records) recs.push_back(decode_record(ctx.pcgs, line));
  res.classes = ambient_fuse(ctx, recs);
  res.stats.back().classes = res.classes.size();
  {
    json j;
    j["layers"] = json::array();
    for (const auto& st : res.stats)
      j["layers"].push_back({{"layer", st.layer}, {"classes", st.classes}, {"jobs", st.jobs}});
    std::string tmp = out_dir + "/stats.json.tmp";
    std::ofstream f(tmp, std::ios::trunc);
    f << j.dump(1) << "\n";
    f.close();
    fs::rename(tmp, out_dir + "/stats.json");
  }
  return res;
}

ShardFile run_job(const LiftContext& ctx, const ShardFile& in, size_t t) {
  const std::string fp = ctx.series_fingerprint();
  if (in.series_fp != fp)
    throw std::runtime_error("shard fingerprint does not match the context");
  if (in.group_desc != group_descriptor(ctx.group))
    throw std::runtime_error("shard group does not match the context");
  if (in.layer + 1 != t)
    throw std::runtime_error("shard layer " + std::to_string(in.layer) +
                             " cannot feed layer " + std::to_string(t));
  if (t < 1 || t > ctx.layer_count()) throw std::runtime_error("layer out of range");

  std::vector<SubgroupRecord> parents;
  parents.reserve(in.records.size());
  for (const std::string& line : in.records) parents.push_back(decode_record(ctx.pcgs, line));

  const std::string kernel_key = kernel_record(ctx.pcgs, t - 1).key;
  std::vector<SubgroupRecord> out;
  for (const SubgroupRecord& parent : parents) {
    if (parent.key == kernel_key) {
      for (const SubgroupRecord& k : ctx.kernel_classes[t]) out.push_back(k);
    } else {
      for (SubgroupRecord& r : lift_parent(ctx, parent, t)) out.push_back(std::move(r));
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SubgroupRecord& a, const SubgroupRecord& b) { return a.key < b.key; });

  ShardFile res;
  res.group_desc = in.group_desc;
  res.series_fp = fp;
  res.layer = t;
  for (const SubgroupRecord& rec : out) res.records.push_back(encode_record(ctx.pcgs, rec));
  return res;
}

}  // namespace holobrace
