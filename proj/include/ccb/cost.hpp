#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ccb/heads.hpp"

namespace ccb::cost {

// Transformer encoder shape used by the analytical FLOPs model. The preset
// entries carry the embedding output dimension from the published model
// cards; layer/hidden/ffn/head counts are the underlying architectures'
// constants, sourced from the respective model configs.
struct EncoderSpec {
    std::string name;
    int layers = 0;
    int hidden_dim = 0;
    int ffn_dim = 0;
    int heads = 0; // does not change the FLOP count; kept for documentation
    int max_seq = 0;
    int out_dim = 0;
};

const std::vector<EncoderSpec>& encoder_presets();
std::optional<EncoderSpec> encoder_preset(const std::string& name);

// Key-value text file: name, layers, hidden_dim, ffn_dim, heads, max_seq, out_dim.
EncoderSpec load_encoder_spec(const std::string& path);

struct FlopCount {
    std::uint64_t flops = 0;

    double gflops() const { return static_cast<double>(flops) / 1e9; }
};

// Dense (m x k) * (k x n) under the 1 MAC = 2 FLOPs convention: 2*m*k*n.
FlopCount matmul_flops(std::uint64_t m, std::uint64_t k, std::uint64_t n);

// Per layer (L = sequence length, d = hidden, f = ffn):
//   QKV projections        3 * 2*L*d*d
//   attention scores QK^T      2*L*L*d
//   attention * V              2*L*L*d
//   output projection          2*L*d*d
//   FFN in                     2*L*d*f
//   FFN out                    2*L*f*d
// summed over layers and batch, plus a 2*L*d*out_dim projection when the
// embedding output dimension differs from the hidden dimension. Softmax,
// layer norm, bias adds and activations are not counted. The attention term
// is head-count independent: h heads of width d/h cost h * 2*L*L*(d/h).
FlopCount encoder_flops(const EncoderSpec& spec, int seq_len, int batch = 1);

// Inference cost of a trained one-vs-rest head per sentence.
//   logistic: 2*dim per label
//   svm:      per label, per support vector: 2*dim for the vector op,
//             +2 accumulate, + kernel constant (poly: degree+2, rbf: dim+2,
//             sigmoid: 3), +1 bias
//   trees:    one comparison-FLOP per level actually present, per tree
//   nb:       2*nnz per class
FlopCount head_flops(const heads::OneVsRestClassifier& clf, int feature_dim,
                     int nnz = 0);

struct MeasurementProtocol {
    int warmup = 2;
    int repetitions = 5; // >= 3
    enum class Aggregation { median, mean } aggregation = Aggregation::median;
};

struct RuntimeMeasurement {
    double seconds = 0.0;           // aggregated
    std::vector<double> raw_samples; // measured repetitions, in order
};

// Serializes all in-process measurements; concurrent benchmarks corrupt
// wall-clock numbers.
std::mutex& measurement_lock();

// Monotonic wall clock; warmup runs are discarded, measured repetitions are
// aggregated by the protocol. Throws on repetitions < 3.
RuntimeMeasurement measure_runtime(const std::function<void()>& closure,
                                   const MeasurementProtocol& protocol);

void write_samples_csv(const std::vector<RuntimeMeasurement>& measurements,
                       const std::vector<std::string>& names, const std::string& path);

struct CostReport {
    std::vector<double> runtime_s; // per language: java, python, pharo
    std::vector<double> gflops;    // per language
    double avg_runtime_s = 0.0;    // arithmetic mean of the three
    double avg_gflops = 0.0;
    double total_runtime_s = 0.0;  // sums, reported alongside the means
    double total_gflops = 0.0;
};

// Exactly three languages; throws WrongLanguageCount otherwise.
CostReport cost_report(const std::vector<double>& runtime_s,
                       const std::vector<double>& gflops);

} // namespace ccb::cost
