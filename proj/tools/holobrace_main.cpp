#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "holobrace/brace.hpp"
#include "holobrace/lifting.hpp"
#include "holobrace/oracle.hpp"
#include "holobrace/shard.hpp"

namespace fs = std::filesystem;
using namespace holobrace;
using nlohmann::json;

namespace {

std::optional<std::vector<std::vector<Perm>>> read_series_file(const std::string& path) {
  if (path.empty()) return std::nullopt;
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read series file " + path);
  json j = json::parse(f);
  std::vector<std::vector<Perm>> members;
  for (const auto& gens : j) {
    std::vector<Perm> ms;
    for (const auto& img : gens) ms.push_back(Perm(img.get<std::vector<uint8_t>>()));
    members.push_back(std::move(ms));
  }
  return members;
}

struct StatsFile {
  std::vector<LayerStats> layers;

  static StatsFile load(const std::string& dir) {
    StatsFile s;
    std::ifstream f(dir + "/stats.json");
    if (!f) return s;
    json j = json::parse(f);
    for (const auto& e : j["layers"])
      s.layers.push_back({e.at("layer").get<size_t>(), e.at("classes").get<size_t>(),
                          e.at("jobs").get<size_t>()});
    return s;
  }
};

void print_stats_table(const std::vector<LayerStats>& stats) {
  std::cout << "Layer  # classes  # jobs\n";
  for (const auto& st : stats) {
    if (st.layer == 0) continue;
    printf("%5zu  %9zu  %6zu\n", st.layer, st.classes, st.jobs);
  }
}

std::vector<SubgroupRecord> final_classes(const LiftContext& ctx, const ShardFile& final_shard) {
  if (final_shard.layer != ctx.layer_count())
    throw std::runtime_error("shard layer " + std::to_string(final_shard.layer) +
                             " is not the final layer " + std::to_string(ctx.layer_count()));
  if (final_shard.series_fp != ctx.series_fingerprint())
    throw std::runtime_error("shard fingerprint does not match the context");
  std::vector<SubgroupRecord> recs;
  for (const std::string& line : final_shard.records) recs.push_back(decode_record(ctx.pcgs, line));
  return ambient_fuse(ctx, recs);
}

int cmd_series(const std::string& group, const std::string& series_file, const std::string& out) {
  LiftContext ctx = LiftContext::build(group_from_descriptor(group), read_series_file(series_file),
                                       EngineOptions::from_env());
  write_context(out, ctx);
  std::cout << "context written to " << out << " (" << ctx.layer_count() << " layers, |S| = "
            << ctx.engine_pg.order() << (ctx.sylow_mode ? ", sylow engine" : "") << ")\n";
  return 0;
}

int cmd_layer(const std::string& ctx_dir, size_t layer, const std::string& in, const std::string& out) {
  LiftContext ctx = load_context(ctx_dir, EngineOptions::from_env());
  ShardFile shard = read_shard(in);
  write_shard(out, run_job(ctx, shard, layer));
  return 0;
}

int cmd_split(const std::string& in, size_t jobs, const std::string& prefix) {
  ShardFile shard = read_shard(in);
  auto parts = split_shard(shard, jobs);
  for (size_t j = 0; j < parts.size(); ++j) {
    char buf[32];
    snprintf(buf, sizeof buf, "%03zu.shard", j);
    write_shard(prefix + buf, parts[j]);
  }
  return 0;
}

int cmd_merge(const std::string& out, const std::vector<std::string>& inputs) {
  std::vector<ShardFile> shards;
  for (const std::string& p : inputs) shards.push_back(read_shard(p));
  write_shard(out, merge_shards(shards));
  return 0;
}

int cmd_count(const std::string& ctx_dir, const std::string& final_path) {
  LiftContext ctx = load_context(ctx_dir, EngineOptions::from_env());
  auto classes = final_classes(ctx, read_shard(final_path));
  StatsFile stats = StatsFile::load(ctx_dir);
  if (!stats.layers.empty()) {
    print_stats_table(stats.layers);
  } else {
    // Derive per-layer counts from any merged layer shards present.
    std::vector<LayerStats> derived;
    for (size_t t = 1; t <= ctx.layer_count(); ++t) {
      std::string p = ctx_dir + "/" + layer_shard_name(t);
      if (fs::exists(p)) derived.push_back({t, read_shard(p).records.size(), 1});
    }
    if (!derived.empty()) print_stats_table(derived);
  }
  std::cout << "classes: " << classes.size() << "\n";
  return 0;
}

int cmd_export_braces(const std::string& ctx_dir, const std::string& final_path,
                      const std::string& out) {
  LiftContext ctx = load_context(ctx_dir, EngineOptions::from_env());
  auto classes = final_classes(ctx, read_shard(final_path));
  std::vector<Brace> braces;
  for (const SubgroupRecord& rec : classes) braces.push_back(brace_from_regular(ctx, rec));
  std::string tmp = out + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << export_braces(braces);
  }
  fs::rename(tmp, out);
  std::cout << "braces: " << braces.size() << " -> " << out << "\n";
  return 0;
}

int cmd_oracle(const std::string& group) {
  std::cout << "classes: " << oracle_regular_classes(group_from_descriptor(group)) << "\n";
  return 0;
}

int cmd_full_run(const std::string& group, size_t jobs, const std::string& out,
                 const std::string& series_file) {
  LiftContext ctx = LiftContext::build(group_from_descriptor(group), read_series_file(series_file),
                                       EngineOptions::from_env());
  RunResult res = full_run(ctx, jobs, out);
  print_stats_table(res.stats);
  std::cout << "classes: " << res.classes.size() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regular subgroups of holomorphs of finite abelian groups, and their left braces"};
  app.require_subcommand(1);

  std::string group, series_file, ctx_dir, in_path, out_path, prefix;
  std::vector<std::string> inputs;
  size_t layer = 0, jobs = 1;

  auto* series = app.add_subcommand("series", "build the context directory for a group");
  series->add_option("--group", group, "group descriptor, e.g. 2,2,4,4")->required();
  series->add_option("--series-file", series_file, "JSON list of member generator lists");
  series->add_option("--out", out_path, "context directory")->required();

  auto* layer_cmd = app.add_subcommand("layer", "run one lifting job: parents at layer I-1 -> layer I");
  layer_cmd->add_option("--ctx", ctx_dir)->required();
  layer_cmd->add_option("--layer", layer)->required();
  layer_cmd->add_option("--in", in_path)->required();
  layer_cmd->add_option("--out", out_path)->required();

  auto* split = app.add_subcommand("split", "split a shard into near-equal job shards");
  split->add_option("--in", in_path)->required();
  split->add_option("--jobs", jobs)->required();
  split->add_option("--out-prefix", prefix)->required();

  auto* merge = app.add_subcommand("merge", "merge job shards (sort + dedup)");
  merge->add_option("--out", out_path)->required();
  merge->add_option("inputs", inputs, "input shards")->required();

  auto* count = app.add_subcommand("count", "print class count and layer statistics");
  count->add_option("--ctx", ctx_dir)->required();
  count->add_option("--final", in_path)->required();

  auto* exp = app.add_subcommand("export-braces", "materialize braces from a final shard");
  exp->add_option("--ctx", ctx_dir)->required();
  exp->add_option("--final", in_path)->required();
  exp->add_option("--out", out_path)->required();

  auto* oracle = app.add_subcommand("oracle", "independent class count (cyclic extension)");
  oracle->add_option("--group", group)->required();

  auto* full = app.add_subcommand("full-run", "drive the whole pipeline");
  full->add_option("--group", group)->required();
  full->add_option("--jobs", jobs);
  full->add_option("--series-file", series_file);
  full->add_option("--out", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (series->parsed()) return cmd_series(group, series_file, out_path);
    if (layer_cmd->parsed()) return cmd_layer(ctx_dir, layer, in_path, out_path);
    if (split->parsed()) return cmd_split(in_path, jobs, prefix);
    if (merge->parsed()) return cmd_merge(out_path, inputs);
    if (count->parsed()) return cmd_count(ctx_dir, in_path);
    if (exp->parsed()) return cmd_export_braces(ctx_dir, in_path, out_path);
    if (oracle->parsed()) return cmd_oracle(group);
    if (full->parsed()) return cmd_full_run(group, jobs, out_path, series_file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
