#include "ccb/cost.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "ccb/error.hpp"
#include "ccb/textio.hpp"

namespace ccb::cost {

// Output dimensions from the published model cards; layers / hidden / ffn /
// heads / max sequence length are the underlying architectures' constants
// (MiniLM L3/L6, albert-small, distilroberta-base, mpnet-base).
const std::vector<EncoderSpec>& encoder_presets() {
    static const std::vector<EncoderSpec> presets = {
        {"paraphrase-MiniLM-L3-v2", 3, 384, 1536, 12, 128, 384},
        {"all-MiniLM-L6-v2", 6, 384, 1536, 12, 256, 384},
        {"paraphrase-albert-small-v2", 6, 768, 3072, 12, 100, 768},
        {"all-distilroberta-v1", 6, 768, 3072, 12, 512, 768},
        {"all-mpnet-base-v2", 12, 768, 3072, 12, 384, 768},
    };
    return presets;
}

std::optional<EncoderSpec> encoder_preset(const std::string& name) {
    for (const auto& p : encoder_presets()) {
        if (p.name == name) return p;
    }
    return std::nullopt;
}

EncoderSpec load_encoder_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open " + path);
    EncoderSpec spec;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = textio::trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            fail(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = textio::trim(t.substr(0, eq));
        const std::string value = textio::trim(t.substr(eq + 1));
        try {
            if (key == "name") spec.name = value;
            else if (key == "layers") spec.layers = std::stoi(value);
            else if (key == "hidden_dim") spec.hidden_dim = std::stoi(value);
            else if (key == "ffn_dim") spec.ffn_dim = std::stoi(value);
            else if (key == "heads") spec.heads = std::stoi(value);
            else if (key == "max_seq") spec.max_seq = std::stoi(value);
            else if (key == "out_dim") spec.out_dim = std::stoi(value);
            else fail(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": unknown key " + key);
        } catch (const Error&) {
            throw;
        } catch (const std::exception&) {
            fail(ErrorKind::parse, path + ":" + std::to_string(line_no) + ": bad value for " + key);
        }
    }
    if (spec.layers < 1 || spec.hidden_dim < 1 || spec.ffn_dim < 1 || spec.max_seq < 1 ||
        spec.out_dim < 1) {
        fail(ErrorKind::parse, path + ": incomplete encoder spec");
    }
    return spec;
}

FlopCount matmul_flops(std::uint64_t m, std::uint64_t k, std::uint64_t n) {
    if (m < 1 || k < 1 || n < 1) fail(ErrorKind::invalid_argument, "matmul dims must be >= 1");
    return {2 * m * k * n};
}

FlopCount encoder_flops(const EncoderSpec& spec, int seq_len, int batch) {
    if (seq_len < 1 || batch < 1) fail(ErrorKind::invalid_argument, "seq_len and batch must be >= 1");
    if (seq_len > spec.max_seq) {
        fail(ErrorKind::seq_too_long,
             "sequence length " + std::to_string(seq_len) + " exceeds " + spec.name +
                 " maximum " + std::to_string(spec.max_seq));
    }
    const std::uint64_t L = static_cast<std::uint64_t>(seq_len);
    const std::uint64_t d = static_cast<std::uint64_t>(spec.hidden_dim);
    const std::uint64_t f = static_cast<std::uint64_t>(spec.ffn_dim);

    std::uint64_t per_layer = 0;
    per_layer += 3 * matmul_flops(L, d, d).flops; // Q, K, V projections
    per_layer += matmul_flops(L, d, L).flops;     // attention scores
    per_layer += matmul_flops(L, L, d).flops;     // attention-weighted values
    per_layer += matmul_flops(L, d, d).flops;     // attention output projection
    per_layer += matmul_flops(L, d, f).flops;     // FFN expand
    per_layer += matmul_flops(L, f, d).flops;     // FFN contract

    std::uint64_t total = static_cast<std::uint64_t>(spec.layers) * per_layer;
    if (spec.out_dim != spec.hidden_dim) {
        total += matmul_flops(L, d, static_cast<std::uint64_t>(spec.out_dim)).flops;
    }
    return {static_cast<std::uint64_t>(batch) * total};
}

FlopCount head_flops(const heads::OneVsRestClassifier& clf, int feature_dim, int nnz) {
    if (feature_dim < 0 || nnz < 0) fail(ErrorKind::invalid_argument, "negative dimension");
    const std::uint64_t dim = static_cast<std::uint64_t>(feature_dim);

    if (clf.is_single_class()) {
        // score every class against the observed token counts
        return {2 * static_cast<std::uint64_t>(nnz) * static_cast<std::uint64_t>(clf.n_labels)};
    }

    std::uint64_t total = 0;
    for (const auto& head : clf.heads) {
        if (std::holds_alternative<heads::LogisticHead>(head)) {
            total += 2 * dim;
        } else if (const auto* svm = std::get_if<heads::SvmHead>(&head)) {
            const auto n_sv = static_cast<std::uint64_t>(svm->support_vectors.size());
            if (n_sv == 0) {
                fail(ErrorKind::invalid_argument, "svm head without support vectors");
            }
            std::uint64_t kernel_const = 0;
            switch (svm->params.kernel) {
                case heads::Kernel::linear: kernel_const = 0; break;
                case heads::Kernel::poly:
                    kernel_const = static_cast<std::uint64_t>(svm->params.degree) + 2;
                    break;
                case heads::Kernel::rbf: kernel_const = dim + 2; break;
                case heads::Kernel::sigmoid: kernel_const = 3; break;
            }
            total += n_sv * (2 * dim + kernel_const + 2) + 1;
        } else if (const auto* forest = std::get_if<heads::ForestHead>(&head)) {
            for (const auto& tree : forest->trees) {
                total += static_cast<std::uint64_t>(tree.depth());
            }
        } else if (const auto* boosted = std::get_if<heads::BoostedHead>(&head)) {
            for (const auto& tree : boosted->trees) {
                total += static_cast<std::uint64_t>(tree.depth()) + 2; // walk + scaled add
            }
        }
        // constant heads cost nothing
    }
    return {total};
}

std::mutex& measurement_lock() {
    static std::mutex lock;
    return lock;
}

RuntimeMeasurement measure_runtime(const std::function<void()>& closure,
                                   const MeasurementProtocol& protocol) {
    if (protocol.repetitions < 3) {
        fail(ErrorKind::invalid_argument, "measurement needs at least 3 repetitions");
    }
    if (protocol.warmup < 0) fail(ErrorKind::invalid_argument, "negative warmup");

    using clock = std::chrono::steady_clock;
    RuntimeMeasurement m;
    for (int i = 0; i < protocol.warmup; ++i) closure();
    for (int i = 0; i < protocol.repetitions; ++i) {
        const auto begin = clock::now();
        closure();
        const auto end = clock::now();
        m.raw_samples.push_back(std::chrono::duration<double>(end - begin).count());
    }

    if (protocol.aggregation == MeasurementProtocol::Aggregation::mean) {
        double sum = 0.0;
        for (double s : m.raw_samples) sum += s;
        m.seconds = sum / static_cast<double>(m.raw_samples.size());
    } else {
        std::vector<double> sorted = m.raw_samples;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t n = sorted.size();
        m.seconds = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    }
    return m;
}

void write_samples_csv(const std::vector<RuntimeMeasurement>& measurements,
                       const std::vector<std::string>& names, const std::string& path) {
    std::ostringstream out;
    out << "name,rep,seconds\n";
    for (std::size_t k = 0; k < measurements.size(); ++k) {
        for (std::size_t r = 0; r < measurements[k].raw_samples.size(); ++r) {
            out << textio::csv_escape(names[k]) << ',' << r << ','
                << textio::format_double(measurements[k].raw_samples[r]) << '\n';
        }
    }
    textio::write_file(path, out.str());
}

CostReport cost_report(const std::vector<double>& runtime_s, const std::vector<double>& gflops) {
    if (runtime_s.size() != 3 || gflops.size() != 3) {
        fail(ErrorKind::wrong_language_count, "cost report needs exactly 3 languages");
    }
    CostReport report;
    report.runtime_s = runtime_s;
    report.gflops = gflops;
    for (int i = 0; i < 3; ++i) {
        report.total_runtime_s += runtime_s[static_cast<std::size_t>(i)];
        report.total_gflops += gflops[static_cast<std::size_t>(i)];
    }
    report.avg_runtime_s = report.total_runtime_s / 3.0;
    report.avg_gflops = report.total_gflops / 3.0;
    return report;
}

} // namespace ccb::cost
