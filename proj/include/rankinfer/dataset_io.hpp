#ifndef RANKINFER_DATASET_IO_HPP
#define RANKINFER_DATASET_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rankinfer/types.hpp"

namespace rankinfer {

// On-disk dataset formats.
//
// trial-csv: a preamble declaring each edge, then one row per trial:
//     # edge,e1,a;b;c
//     edge_id,trial,winner
//     e1,1,a
// aggregate-csv: one row per (edge, member):
//     edge_id,item,wins,trials
// json: {"graph": {"n", "m_way", "edges"}, "trials", "wins", "trial_level"?,
//        "item_ids"}, with edges and winners given as dense indices.
//
// Items are external string labels mapped to dense indices in order of first
// appearance. Records that repeat an edge's member set are merged (trials
// concatenated, wins summed); every merged edge must end up with the same
// number of trials.
enum class DatasetFormat { kTrialCsv, kAggregateCsv, kJson };

DatasetFormat parse_format(const std::string& name);
std::string to_string(DatasetFormat format);
/// Guesses from the extension: .json is json, .csv is sniffed from the content.
DatasetFormat infer_format(const std::filesystem::path& path);

ComparisonDataset read_dataset(std::istream& in, DatasetFormat format,
                               std::vector<std::string>* warnings = nullptr);
ComparisonDataset load_dataset(const std::filesystem::path& path, DatasetFormat format,
                               std::vector<std::string>* warnings = nullptr);

void write_dataset(std::ostream& out, const ComparisonDataset& data, DatasetFormat format);
void save_dataset(const std::filesystem::path& path, const ComparisonDataset& data,
                  DatasetFormat format);

nlohmann::json dataset_to_json(const ComparisonDataset& data);
ComparisonDataset dataset_from_json(const nlohmann::json& j);

}  // namespace rankinfer

#endif  // RANKINFER_DATASET_IO_HPP
