#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "smellnet/random.hpp"
#include "smellnet/token_encoder.hpp"

namespace smellnet {

/// One encoded fragment. 1D samples hold a single row; 2D samples hold one
/// row per source line. Rows are unpadded.
struct Sample {
  std::string fragment_id;
  std::vector<std::vector<TokenId>> rows;
  bool positive = false;

  std::size_t length() const;  // 1D: token count; 2D: widest row
  std::size_t height() const { return rows.size(); }
  std::vector<TokenId> flattened() const;
};

Sample make_sample_1d(std::string id, const TokenSequence1D& seq, bool positive);
Sample make_sample_2d(std::string id, const TokenGrid2D& grid, bool positive);

struct CurationConfig {
  double split_fraction = 0.70;
  std::size_t max_train_per_class = 5000;
  std::uint64_t seed = 0;
  std::size_t chunk_bytes = 50u << 20;
};

/// Per-class sample counts after each curation stage.
struct ClassCounts {
  std::size_t initial = 0;
  std::size_t after_dedup = 0;
  std::size_t after_filter = 0;
  std::size_t train_split = 0;
  std::size_t eval_split = 0;
  std::size_t train_capped = 0;
  std::size_t train_balanced = 0;
};

struct StageCounts {
  ClassCounts positive;
  ClassCounts negative;
};

/// Exact-equality dedup on the flattened ids; the first occurrence survives.
std::vector<Sample> deduplicate(std::vector<Sample> samples);

struct OutlierBounds {
  double length_bound = 0;
  double height_bound = 0;
};

/// Upper bound mean + population stddev over the class-pooled set.
OutlierBounds outlier_bounds(const std::vector<Sample>& samples, int dim);
std::vector<Sample> filter_outliers(std::vector<Sample> samples, int dim);

struct TrainEvalSplit {
  std::vector<Sample> train;
  std::vector<Sample> eval;
};

/// floor(fraction * n) of each class goes to training, chosen by a seeded
/// shuffle; classes are split independently.
std::size_t train_share(std::size_t n, double fraction);
TrainEvalSplit split_train_eval(std::vector<Sample> samples, double fraction, Rng& rng);

/// Keeps the first `max_per_class` samples of each class, in current order.
std::vector<Sample> cap_training(std::vector<Sample> train, std::size_t max_per_class);

/// Truncates both classes to the smaller class count, dropping from the tail.
std::vector<Sample> balance_training(std::vector<Sample> train);

std::size_t count_positive(const std::vector<Sample>& samples);

/// Uniform block of samples; data is count x rows x cols, row-major.
struct TensorBlock {
  int dim = 1;
  std::size_t rows = 1;
  std::size_t cols = 0;
  std::vector<std::uint32_t> data;
  std::vector<std::uint8_t> labels;
  std::vector<std::string> fragment_ids;  // in-memory only, not persisted

  std::size_t count() const { return labels.size(); }
  std::size_t sample_size() const { return rows * cols; }
  const std::uint32_t* sample(std::size_t i) const { return data.data() + i * sample_size(); }
  std::size_t positives() const;
};

/// Pads every sample to (rows, cols); samples are truncated if larger. For 1D
/// rows must be 1.
TensorBlock pad_and_pack(const std::vector<Sample>& samples, int dim, std::size_t rows,
                         std::size_t cols);
/// Pads to the largest surviving extent.
TensorBlock pad_and_pack(const std::vector<Sample>& samples, int dim);

/// Same block re-padded (or truncated) to a different extent.
TensorBlock conform(const TensorBlock& block, std::size_t rows, std::size_t cols);

/// Applies one seeded permutation to samples and labels together.
void shuffle(TensorBlock& block, Rng& rng);

class ChunkError : public std::runtime_error {
 public:
  enum class Kind { bad_magic, version_mismatch, truncated_chunk, io };
  ChunkError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr std::uint32_t kChunkVersion = 1;

/// Samples per chunk: the largest count whose payload fits `chunk_bytes`.
std::size_t samples_per_chunk(std::size_t rows, std::size_t cols, std::size_t chunk_bytes);

/// Writes chunk_<k>.smlt files; returns the number of chunks written.
std::size_t write_chunks(const TensorBlock& block, const std::filesystem::path& dir,
                         std::size_t chunk_bytes = 50u << 20);
TensorBlock read_chunks(const std::filesystem::path& dir);

struct CuratedDataset {
  std::string smell;
  int dim = 1;
  TensorBlock train;
  TensorBlock eval;
  StageCounts counts;
};

/// dedup -> outlier filter -> split -> cap -> balance -> pad -> shuffle.
CuratedDataset curate(std::vector<Sample> samples, int dim, const CurationConfig& config);

/// <dir>/{train,eval}/chunk_<k>.smlt plus <dir>/manifest.txt.
void save_dataset(const CuratedDataset& ds, const std::filesystem::path& dir,
                  const std::map<std::string, std::string>& manifest_extra,
                  std::size_t chunk_bytes);
CuratedDataset load_dataset(const std::filesystem::path& dir);

/// key=value lines; later keys win.
std::map<std::string, std::string> read_manifest(const std::filesystem::path& file);

}  // namespace smellnet
