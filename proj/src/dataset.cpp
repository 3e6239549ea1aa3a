#include "smellnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace smellnet {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<unsigned char> slurp(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ChunkError(ChunkError::Kind::io, "cannot open " + file.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::filesystem::path chunk_path(const std::filesystem::path& dir, std::size_t k) {
  return dir / ("chunk_" + std::to_string(k) + ".smlt");
}

void write_counts(std::ostream& os, const char* cls, const ClassCounts& c) {
  os << cls << ".initial=" << c.initial << "\n";
  os << cls << ".after_dedup=" << c.after_dedup << "\n";
  os << cls << ".after_filter=" << c.after_filter << "\n";
  os << cls << ".train_split=" << c.train_split << "\n";
  os << cls << ".eval_split=" << c.eval_split << "\n";
  os << cls << ".train_capped=" << c.train_capped << "\n";
  os << cls << ".train_balanced=" << c.train_balanced << "\n";
}

ClassCounts read_counts(const std::map<std::string, std::string>& m, const std::string& cls) {
  auto get = [&](const char* key) -> std::size_t {
    auto it = m.find(cls + "." + key);
    return it == m.end() ? 0 : std::stoull(it->second);
  };
  ClassCounts c;
  c.initial = get("initial");
  c.after_dedup = get("after_dedup");
  c.after_filter = get("after_filter");
  c.train_split = get("train_split");
  c.eval_split = get("eval_split");
  c.train_capped = get("train_capped");
  c.train_balanced = get("train_balanced");
  return c;
}

}  // namespace

std::size_t Sample::length() const {
  std::size_t n = 0;
  for (const auto& r : rows) n = std::max(n, r.size());
  return n;
}

std::vector<TokenId> Sample::flattened() const {
  std::vector<TokenId> out;
  for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
  return out;
}

Sample make_sample_1d(std::string id, const TokenSequence1D& seq, bool positive) {
  return Sample{std::move(id), {seq.ids}, positive};
}

Sample make_sample_2d(std::string id, const TokenGrid2D& grid, bool positive) {
  Sample s{std::move(id), {}, positive};
  for (const auto& row : grid.rows) {
    auto end = row.end();
    while (end != row.begin() && *(end - 1) == Vocabulary::kPadding) --end;
    s.rows.emplace_back(row.begin(), end);
  }
  return s;
}

std::vector<Sample> deduplicate(std::vector<Sample> samples) {
  std::set<std::vector<TokenId>> seen;
  std::vector<Sample> out;
  out.reserve(samples.size());
  for (auto& s : samples) {
    if (seen.insert(s.flattened()).second) out.push_back(std::move(s));
  }
  return out;
}

OutlierBounds outlier_bounds(const std::vector<Sample>& samples, int dim) {
  auto bound = [&](auto extent) {
    double sum = 0;
    for (const auto& s : samples) sum += static_cast<double>(extent(s));
    const double mean = sum / static_cast<double>(samples.size());
    double sq = 0;
    for (const auto& s : samples) {
      const double d = static_cast<double>(extent(s)) - mean;
      sq += d * d;
    }
    return mean + std::sqrt(sq / static_cast<double>(samples.size()));
  };
  OutlierBounds b;
  if (samples.empty()) return b;
  b.length_bound = bound([](const Sample& s) { return s.length(); });
  b.height_bound = dim == 2 ? bound([](const Sample& s) { return s.height(); }) : 0.0;
  return b;
}

std::vector<Sample> filter_outliers(std::vector<Sample> samples, int dim) {
  if (samples.size() < 2) return samples;
  const OutlierBounds b = outlier_bounds(samples, dim);
  std::vector<Sample> out;
  out.reserve(samples.size());
  for (auto& s : samples) {
    if (static_cast<double>(s.length()) > b.length_bound) continue;
    if (dim == 2 && static_cast<double>(s.height()) > b.height_bound) continue;
    out.push_back(std::move(s));
  }
  return out;
}

std::size_t train_share(std::size_t n, double fraction) {
  // The epsilon keeps exact products such as 0.7 * 10 from flooring to 6.
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

TrainEvalSplit split_train_eval(std::vector<Sample> samples, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("split fraction must lie in (0, 1)");
  }
  TrainEvalSplit out;
  for (bool cls : {true, false}) {
    std::vector<Sample> members;
    for (auto& s : samples) {
      if (s.positive == cls) members.push_back(std::move(s));
    }
    rng.shuffle(members);
    const std::size_t n_train = train_share(members.size(), fraction);
    for (std::size_t i = 0; i < members.size(); ++i) {
      (i < n_train ? out.train : out.eval).push_back(std::move(members[i]));
    }
  }
  return out;
}

std::vector<Sample> cap_training(std::vector<Sample> train, std::size_t max_per_class) {
  std::vector<Sample> out;
  std::size_t pos = 0, neg = 0;
  for (auto& s : train) {
    std::size_t& n = s.positive ? pos : neg;
    if (n < max_per_class) {
      ++n;
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::size_t count_positive(const std::vector<Sample>& samples) {
  return static_cast<std::size_t>(
      std::count_if(samples.begin(), samples.end(), [](const Sample& s) { return s.positive; }));
}

std::vector<Sample> balance_training(std::vector<Sample> train) {
  const std::size_t pos = count_positive(train);
  const std::size_t keep = std::min(pos, train.size() - pos);
  return cap_training(std::move(train), keep);
}

std::size_t TensorBlock::positives() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), std::uint8_t{1}));
}

TensorBlock pad_and_pack(const std::vector<Sample>& samples, int dim, std::size_t rows,
                         std::size_t cols) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dim must be 1 or 2");
  if (dim == 1 && rows != 1) throw std::invalid_argument("1D blocks have exactly one row");
  TensorBlock block;
  block.dim = dim;
  block.rows = rows;
  block.cols = cols;
  block.data.assign(samples.size() * rows * cols, Vocabulary::kPadding);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    std::uint32_t* out = block.data.data() + i * rows * cols;
    for (std::size_t r = 0; r < std::min(rows, s.rows.size()); ++r) {
      const auto& row = s.rows[r];
      for (std::size_t c = 0; c < std::min(cols, row.size()); ++c) {
        out[r * cols + c] = static_cast<std::uint32_t>(row[c]);
      }
    }
    block.labels.push_back(s.positive ? 1 : 0);
    block.fragment_ids.push_back(s.fragment_id);
  }
  return block;
}

TensorBlock pad_and_pack(const std::vector<Sample>& samples, int dim) {
  std::size_t rows = 1, cols = 0;
  for (const auto& s : samples) {
    cols = std::max(cols, s.length());
    if (dim == 2) rows = std::max(rows, s.height());
  }
  return pad_and_pack(samples, dim, rows, cols);
}

TensorBlock conform(const TensorBlock& block, std::size_t rows, std::size_t cols) {
  if (block.rows == rows && block.cols == cols) return block;
  TensorBlock out;
  out.dim = block.dim;
  out.rows = rows;
  out.cols = cols;
  out.labels = block.labels;
  out.fragment_ids = block.fragment_ids;
  out.data.assign(block.count() * rows * cols, Vocabulary::kPadding);
  for (std::size_t i = 0; i < block.count(); ++i) {
    const std::uint32_t* in = block.sample(i);
    std::uint32_t* dst = out.data.data() + i * rows * cols;
    for (std::size_t r = 0; r < std::min(rows, block.rows); ++r) {
      for (std::size_t c = 0; c < std::min(cols, block.cols); ++c) {
        dst[r * cols + c] = in[r * block.cols + c];
      }
    }
  }
  return out;
}

void shuffle(TensorBlock& block, Rng& rng) {
  std::vector<std::size_t> order(block.count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.shuffle(order);
  TensorBlock out;
  out.dim = block.dim;
  out.rows = block.rows;
  out.cols = block.cols;
  out.data.reserve(block.data.size());
  for (std::size_t i : order) {
    out.data.insert(out.data.end(), block.sample(i), block.sample(i) + block.sample_size());
    out.labels.push_back(block.labels[i]);
    if (!block.fragment_ids.empty()) out.fragment_ids.push_back(block.fragment_ids[i]);
  }
  block = std::move(out);
}

std::size_t samples_per_chunk(std::size_t rows, std::size_t cols, std::size_t chunk_bytes) {
  const std::size_t per_sample = std::max<std::size_t>(1, rows * cols * 4);
  return std::max<std::size_t>(1, chunk_bytes / per_sample);
}

std::size_t write_chunks(const TensorBlock& block, const std::filesystem::path& dir,
                         std::size_t chunk_bytes) {
  std::filesystem::create_directories(dir);
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".smlt") std::filesystem::remove(entry.path());
  }
  const std::size_t per_chunk = samples_per_chunk(block.rows, block.cols, chunk_bytes);
  std::size_t written = 0;
  std::size_t k = 0;
  do {
    const std::size_t n = std::min(per_chunk, block.count() - written);
    std::ofstream out(chunk_path(dir, k), std::ios::binary);
    if (!out) throw ChunkError(ChunkError::Kind::io, "cannot write " + chunk_path(dir, k).string());
    out.write("SMLT", 4);
    put_u32(out, kChunkVersion);
    put_u32(out, static_cast<std::uint32_t>(block.dim));
    put_u32(out, static_cast<std::uint32_t>(block.rows));
    put_u32(out, static_cast<std::uint32_t>(block.cols));
    put_u32(out, static_cast<std::uint32_t>(n));
    const std::uint32_t* first = block.data.data() + written * block.sample_size();
    for (std::size_t i = 0; i < n * block.sample_size(); ++i) put_u32(out, first[i]);
    out.write(reinterpret_cast<const char*>(block.labels.data() + written),
              static_cast<std::streamsize>(n));
    written += n;
    ++k;
  } while (written < block.count());
  return k;
}

TensorBlock read_chunks(const std::filesystem::path& dir) {
  TensorBlock block;
  bool first = true;
  for (std::size_t k = 0; std::filesystem::exists(chunk_path(dir, k)); ++k) {
    const auto bytes = slurp(chunk_path(dir, k));
    const std::string name = chunk_path(dir, k).string();
    if (bytes.size() < 4 || std::string(bytes.begin(), bytes.begin() + 4) != "SMLT") {
      throw ChunkError(ChunkError::Kind::bad_magic, "bad magic in " + name);
    }
    if (bytes.size() < 24) throw ChunkError(ChunkError::Kind::truncated_chunk, "short header in " + name);
    if (get_u32(&bytes[4]) != kChunkVersion) {
      throw ChunkError(ChunkError::Kind::version_mismatch, "unsupported chunk version in " + name);
    }
    const int dim = static_cast<int>(get_u32(&bytes[8]));
    const std::size_t rows = get_u32(&bytes[12]);
    const std::size_t cols = get_u32(&bytes[16]);
    const std::size_t count = get_u32(&bytes[20]);
    const std::size_t payload = count * rows * cols * 4;
    if (bytes.size() < 24 + payload + count) {
      throw ChunkError(ChunkError::Kind::truncated_chunk, "truncated payload in " + name);
    }
    if (first) {
      block.dim = dim;
      block.rows = rows;
      block.cols = cols;
      first = false;
    } else if (dim != block.dim || rows != block.rows || cols != block.cols) {
      throw ChunkError(ChunkError::Kind::truncated_chunk, "inconsistent chunk shape in " + name);
    }
    for (std::size_t i = 0; i < count * rows * cols; ++i) {
      block.data.push_back(get_u32(&bytes[24 + 4 * i]));
    }
    block.labels.insert(block.labels.end(), bytes.begin() + static_cast<std::ptrdiff_t>(24 + payload),
                        bytes.begin() + static_cast<std::ptrdiff_t>(24 + payload + count));
  }
  if (first) throw ChunkError(ChunkError::Kind::io, "no chunks in " + dir.string());
  return block;
}

CuratedDataset curate(std::vector<Sample> samples, int dim, const CurationConfig& config) {
  CuratedDataset ds;
  ds.dim = dim;
  auto& pos = ds.counts.positive;
  auto& neg = ds.counts.negative;
  auto tally = [](const std::vector<Sample>& v, std::size_t& p, std::size_t& n) {
    p = count_positive(v);
    n = v.size() - p;
  };

  Rng rng(config.seed);
  tally(samples, pos.initial, neg.initial);
  samples = deduplicate(std::move(samples));
  tally(samples, pos.after_dedup, neg.after_dedup);
  samples = filter_outliers(std::move(samples), dim);
  tally(samples, pos.after_filter, neg.after_filter);

  // Every curated block shares one extent so train and eval feed the same model.
  std::size_t rows = 1, cols = 0;
  for (const auto& s : samples) {
    cols = std::max(cols, s.length());
    if (dim == 2) rows = std::max(rows, s.height());
  }

  TrainEvalSplit split = split_train_eval(std::move(samples), config.split_fraction, rng);
  tally(split.train, pos.train_split, neg.train_split);
  tally(split.eval, pos.eval_split, neg.eval_split);
  auto train = cap_training(std::move(split.train), config.max_train_per_class);
  tally(train, pos.train_capped, neg.train_capped);
  train = balance_training(std::move(train));
  tally(train, pos.train_balanced, neg.train_balanced);

  ds.train = pad_and_pack(train, dim, rows, cols);
  ds.eval = pad_and_pack(split.eval, dim, rows, cols);
  shuffle(ds.train, rng);
  shuffle(ds.eval, rng);
  return ds;
}

void save_dataset(const CuratedDataset& ds, const std::filesystem::path& dir,
                  const std::map<std::string, std::string>& manifest_extra,
                  std::size_t chunk_bytes) {
  std::filesystem::create_directories(dir);
  write_chunks(ds.train, dir / "train", chunk_bytes);
  write_chunks(ds.eval, dir / "eval", chunk_bytes);
  std::ofstream m(dir / "manifest.txt");
  m << "smell=" << ds.smell << "\n";
  m << "dim=" << ds.dim << "\n";
  m << "rows=" << ds.train.rows << "\n";
  m << "cols=" << ds.train.cols << "\n";
  m << "vocabulary=" << Vocabulary::kVersion << "\n";
  m << "vocabulary_hash=" << Vocabulary::standard().hash() << "\n";
  write_counts(m, "positive", ds.counts.positive);
  write_counts(m, "negative", ds.counts.negative);
  m << "eval.positive=" << ds.eval.positives() << "\n";
  m << "eval.negative=" << ds.eval.count() - ds.eval.positives() << "\n";
  for (const auto& [k, v] : manifest_extra) m << k << "=" << v << "\n";
}

std::map<std::string, std::string> read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read manifest " + file.string());
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

CuratedDataset load_dataset(const std::filesystem::path& dir) {
  const auto manifest = read_manifest(dir / "manifest.txt");
  CuratedDataset ds;
  ds.smell = manifest.count("smell") ? manifest.at("smell") : "";
  ds.dim = manifest.count("dim") ? std::stoi(manifest.at("dim")) : 1;
  ds.train = read_chunks(dir / "train");
  ds.eval = read_chunks(dir / "eval");
  ds.counts.positive = read_counts(manifest, "positive");
  ds.counts.negative = read_counts(manifest, "negative");
  return ds;
}

}  // namespace smellnet
