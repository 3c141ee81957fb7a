#pragma once

#include <optional>
#include <string>
#include <vector>

#include "holobrace/lifting.hpp"

namespace holobrace {

/// On-disk layer checkpoint. Header line:
///   HBL1 <group-descriptor> <series-fp-hex> layer=<i> n=<count>
/// followed by <count> record lines "m:v_1,...,v_m" (decimal), LF line
/// endings, trailing newline required.
struct ShardFile {
  std::string group_desc;
  std::string series_fp;
  size_t layer = 0;
  std::vector<std::string> records;
};

std::string encode_record(const Pcgs& pcgs, const SubgroupRecord& rec);
SubgroupRecord decode_record(const Pcgs& pcgs, const std::string& line);

std::string shard_to_string(const ShardFile& s);
ShardFile shard_from_string(const std::string& text);
void write_shard(const std::string& path, const ShardFile& s);
ShardFile read_shard(const std::string& path);

/// Contiguous near-equal split preserving record order; concatenating
/// the outputs reproduces the input body.
std::vector<ShardFile> split_shard(const ShardFile& in, size_t k);

/// Concatenation + global sort by encoded key + duplicate collapse.
/// Purely syntactic: record lines sort by (row count, row values).
ShardFile merge_shards(const std::vector<ShardFile>& shards);

/// Context directory: ctx.json (group, engine mode, series member
/// generators, fingerprint), kernel_<t>.shard per layer, and the
/// layer-0 seed shard.
void write_context(const std::string& dir, const LiftContext& ctx);
LiftContext load_context(const std::string& dir, const EngineOptions& opts);

/// Applies lift_parent / kernel splicing to every record of a parent
/// shard, producing the layer-t shard (sorted, deterministic).
ShardFile run_job(const LiftContext& ctx, const ShardFile& in, size_t t);

std::string layer_shard_name(size_t t);

/// The whole pipeline, file-mediated: context, per-layer split /
/// run_job / merge checkpoints under out_dir, final ambient fusion.
/// Returns the fused classes and per-layer statistics, and leaves
/// layer_XXX.shard plus stats.json in out_dir.
RunResult full_run(const LiftContext& ctx, size_t jobs, const std::string& out_dir);

}  // namespace holobrace
