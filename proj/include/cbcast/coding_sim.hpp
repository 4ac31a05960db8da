#pragma once

// Monte-Carlo simulation of the compress-bin scheme over MIS codewords, plus
// exhaustive single-shot execution of partition codes.
//
// Codebook: L = floor(q^{nR'}) i.i.d. sequences W^n(l) drawn from P_W.
// Bins of B = max(1, floor(q^{n(R'-R)})) consecutive indices; bin of l is
// l / B (0-based throughout). The encoder picks uniformly among codewords
// eps'-typical with X^n, or l* = 0 when there is none. User i decodes the
// unique in-bin codeword eps-typical with its side information.
//
// Two codebook modes draw the same distribution:
//  - explicit: every codeword is generated and scanned;
//  - lazy: only the codewords that matter are generated. The number of
//    typical codewords is Binomial(L, p_T) with p_T computed exactly, and the
//    chosen and in-bin codewords are drawn conditioned on their typicality
//    status.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "entropy.hpp"
#include "errors.hpp"
#include "instance.hpp"
#include "mis.hpp"
#include "oracle.hpp"
#include "parallel.hpp"

namespace cbcast {

// --- single-shot execution --------------------------------------------------

struct SingleShotRow {
    TupleId tuple = 0;
    std::size_t cell = 0;
    std::vector<int> decoded;   // per user
    std::vector<int> truth;
};

struct SingleShotResult {
    std::vector<SingleShotRow> rows;
    bool ok = true;
    std::string failure;        // first mismatch
};

/// Runs the partition code on every support tuple. Each user decodes from
/// (cell, own side information) by taking f_i of the smallest tuple in the
/// cell with the same side information.
inline SingleShotResult single_shot_execute(const Instance& inst, const Partition& p) {
    require_valid(inst);
    auto vs = partition_structure_violations(inst, p);
    if (!vs.empty()) throw ValidationError(std::move(vs));
    const auto sp = inst.space();
    std::vector<std::size_t> cell_of(inst.tuple_count(), 0);
    for (std::size_t k = 0; k < p.cells.size(); ++k)
        for (TupleId t : p.cells[k]) cell_of[t] = k;

    SingleShotResult res;
    for (TupleId t : support(inst)) {
        SingleShotRow row{t, cell_of[t], {}, {}};
        const auto& cell = p.cells[row.cell];
        for (std::size_t i = 0; i < inst.users.size(); ++i) {
            const auto key = side_key(inst, i, t);
            TupleId rep = t;
            for (TupleId u : cell)
                if (side_key(inst, i, u) == key) {
                    rep = u;
                    break;
                }
            const int got = inst.users[i].demand(rep);
            const int want = inst.users[i].demand(t);
            row.decoded.push_back(got);
            row.truth.push_back(want);
            if (got != want && res.ok) {
                res.ok = false;
                res.failure = "tuple " + sp.format(t) + ": user " + std::to_string(i + 1) + " decodes " +
                              std::to_string(got) + ", demand is " + std::to_string(want);
            }
        }
        res.rows.push_back(std::move(row));
    }
    return res;
}

/// Partition induced by a deterministic cover: tuples sharing a set.
inline Partition cover_partition(const Instance& inst, const CoverDistribution& cover) {
    if (!cover.is_deterministic()) throw std::invalid_argument("cover is not deterministic");
    const auto verts = support(inst);
    if (cover.rows.size() != verts.size()) throw std::invalid_argument("cover does not match the support");
    std::vector<std::vector<TupleId>> by_set(cover.rows.empty() ? 0 : cover.rows[0].size());
    for (std::size_t v = 0; v < verts.size(); ++v)
        for (std::size_t w = 0; w < cover.rows[v].size(); ++w)
            if (cover.rows[v][w] > 0.0) by_set[w].push_back(verts[v]);
    Partition p{std::move(by_set)};
    p.normalize();
    return p;
}

// --- typicality -------------------------------------------------------------

/// Dense joint PMF of a symbol pair (a, b).
struct PairTable {
    std::size_t rows = 0, cols = 0;
    std::vector<double> p;

    PairTable() = default;
    PairTable(std::size_t r, std::size_t c) : rows(r), cols(c), p(r * c, 0.0) {}
    double& at(std::size_t a, std::size_t b) { return p[a * cols + b]; }
    double at(std::size_t a, std::size_t b) const { return p[a * cols + b]; }
};

inline constexpr double typicality_count_tolerance = 1e-7;

/// Allowed occurrence counts of a symbol with probability p in n draws:
/// |N - n p| <= slack n p.
inline std::pair<int, int> typical_count_range(double p, int n, double slack) {
    const double lo = static_cast<double>(n) * p * (1.0 - slack);
    const double hi = static_cast<double>(n) * p * (1.0 + slack);
    return {std::max(0, static_cast<int>(std::ceil(lo - typicality_count_tolerance))),
            std::min(n, static_cast<int>(std::floor(hi + typicality_count_tolerance)))};
}

/// Strong typicality test for pairs of sequences of fixed length against a
/// fixed reference.
class TypicalityTest {
public:
    TypicalityTest() = default;

    TypicalityTest(const PairTable& ref, int n, double slack) : cols_(ref.cols), n_(n), counts_(ref.p.size(), 0) {
        if (n < 1) throw std::invalid_argument("sequence length must be positive");
        for (std::size_t k = 0; k < ref.p.size(); ++k) {
            if (ref.p[k] <= 0.0) continue;
            const auto [lo, hi] = typical_count_range(ref.p[k], n, slack);
            cells_.push_back({k, lo, hi});
        }
    }

    template <typename A, typename B>
    bool operator()(const A& a, const B& b) {
        if (a.size() != static_cast<std::size_t>(n_) || b.size() != a.size())
            throw std::invalid_argument("typicality test: length mismatch");
        for (std::size_t t = 0; t < a.size(); ++t) ++counts_[static_cast<std::size_t>(a[t]) * cols_ + b[t]];
        bool ok = true;
        int covered = 0;
        for (const auto& c : cells_) {
            const int got = counts_[c.index];
            covered += got;
            if (got < c.lo || got > c.hi) ok = false;
        }
        ok = ok && covered == n_;   // otherwise a zero-probability pair occurred
        for (std::size_t t = 0; t < a.size(); ++t) counts_[static_cast<std::size_t>(a[t]) * cols_ + b[t]] = 0;
        return ok;
    }

private:
    struct Cell {
        std::size_t index;
        int lo, hi;
    };
    std::size_t cols_ = 0;
    int n_ = 0;
    std::vector<Cell> cells_;
    std::vector<int> counts_;
};

/// True iff every joint symbol's empirical frequency is within slack times
/// its reference probability, and no zero-probability symbol occurs.
inline bool typicality_check(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b,
                             const PairTable& ref, double slack) {
    if (a.size() != b.size()) throw std::invalid_argument("typicality test: length mismatch");
    if (a.empty()) throw std::invalid_argument("typicality test: empty sequences");
    for (std::size_t t = 0; t < a.size(); ++t)
        if (a[t] >= ref.rows || b[t] >= ref.cols) throw std::out_of_range("symbol outside the reference alphabet");
    TypicalityTest test(ref, static_cast<int>(a.size()), slack);
    return test(a, b);
}

// --- configuration and results ----------------------------------------------

enum class CodebookMode { lazy, explicit_codebook };

struct SimConfig {
    int n = 4;
    double R_prime = 1.0;       // base q, per symbol
    double R = 0.5;             // base q, per symbol
    double epsilon = 0.2;
    double epsilon_prime = 0.1;
    std::uint64_t trials = 1000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    CodebookMode mode = CodebookMode::lazy;
    bool keep_traces = false;
};

inline constexpr double codebook_guard = 1e7;
inline constexpr double explicit_symbol_guard = 2e7;

/// Violations of the configuration invariants. R' = R is allowed: it is the
/// one-bin-per-codeword configuration.
inline std::vector<Violation> validate_sim_config(const SimConfig& c) {
    std::vector<Violation> vs;
    if (c.n < 1) vs.push_back({"n", "block length must be at least 1"});
    if (!(c.R >= 0.0)) vs.push_back({"R", "bin rate must be non-negative"});
    if (!(c.R_prime >= c.R)) vs.push_back({"R_prime", "codebook rate must be at least the bin rate"});
    if (!(c.epsilon_prime > 0.0)) vs.push_back({"epsilon_prime", "must be positive"});
    if (!(c.epsilon > c.epsilon_prime)) vs.push_back({"epsilon", "must exceed epsilon_prime"});
    if (c.trials < 1) vs.push_back({"trials", "need at least one trial"});
    return vs;
}

struct CodebookShape {
    std::uint64_t codewords = 1;
    std::uint64_t bin_size = 1;
    std::uint64_t bins = 1;
};

inline CodebookShape codebook_shape(int q, const SimConfig& c) {
    const double lq = std::log(static_cast<double>(q));
    const double total = std::exp(static_cast<double>(c.n) * c.R_prime * lq);
    if (total > codebook_guard + 0.5)
        throw GuardError("codebook size q^(nR') = " + std::to_string(total) + " exceeds 1e7");
    CodebookShape s;
    s.codewords = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(total + 1e-9)));
    const double per_bin = std::exp(static_cast<double>(c.n) * (c.R_prime - c.R) * lq);
    s.bin_size = std::min<std::uint64_t>(s.codewords, std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::floor(per_bin + 1e-9))));
    s.bins = (s.codewords + s.bin_size - 1) / s.bin_size;
    return s;
}

/// Error class of one user in one trial (none when the demand was recovered).
enum class ErrorClass : std::uint8_t { none = 0, er1 = 1, er2 = 2, er3 = 3 };

struct SimTrace {
    std::uint64_t trial = 0;
    std::string source;                    // tuples separated by spaces
    std::uint64_t l_star = 0;
    std::uint64_t m_star = 0;
    std::uint64_t typical_codewords = 0;
    std::vector<std::int64_t> decoded;     // per user; -1 when decoding failed
    std::vector<std::string> estimate;     // per user demand estimate
    std::vector<ErrorClass> error;         // per user
};

struct UserErrorCounts {
    std::uint64_t er1 = 0, er2 = 0, er3 = 0;
    std::uint64_t demand_errors() const { return er1 + er2 + er3; }
};

struct SimSummary {
    SimConfig config;
    CodebookShape shape;
    std::uint64_t trials = 0;
    std::vector<UserErrorCounts> per_user;
    std::uint64_t trials_with_error = 0;   // some user got a wrong demand
    std::vector<SimTrace> traces;

    double total_error_rate() const { return trials ? static_cast<double>(trials_with_error) / trials : 0.0; }
    double rate(std::uint64_t count) const { return trials ? static_cast<double>(count) / trials : 0.0; }
    /// Binomial standard error of a frequency over the trials.
    double standard_error(double p) const { return trials ? std::sqrt(p * (1.0 - p) / trials) : 0.0; }
    std::uint64_t er3_total() const {
        std::uint64_t s = 0;
        for (const auto& u : per_user) s += u.er3;
        return s;
    }
};

/// I(X;W) and max_i I(X;W|S_i) of a cover, in base-`base` units. With W
/// determined by X these are H(W) and max_i H(W|S_i).
struct ChannelThresholds {
    double covering = 0.0;     // I(X;W)
    double binning = 0.0;      // max_i I(X;W|S_i)
};

inline ChannelThresholds channel_thresholds(const Instance& inst, const CoverDistribution& cover, double base) {
    const auto joint = push_channel(source_pmf(inst), cover.rows, "W");
    const auto xs = all_dataset_axes(inst.n_datasets);
    ChannelThresholds t;
    t.covering = conditional_mutual_information(joint, xs, {"W"}, {}, base);
    for (const auto& u : inst.users) {
        const auto side = dataset_axes(u.side_coords);
        std::vector<std::string> rest;
        for (const auto& x : xs)
            if (std::find(side.begin(), side.end(), x) == side.end()) rest.push_back(x);
        const double v = rest.empty() ? 0.0 : conditional_mutual_information(joint, rest, {"W"}, side, base);
        t.binning = std::max(t.binning, v);
    }
    return t;
}

namespace detail {

inline std::size_t sample_discrete(std::mt19937_64& rng, const std::vector<double>& cdf) {
    const double u = uniform01(rng) * cdf.back();
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

inline std::vector<double> cumulative(const std::vector<double>& w) {
    std::vector<double> c(w.size());
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) c[k] = (s += w[k]);
    return c;
}

// Everything a trial needs that does not depend on the trial.
class BinningModel {
public:
    BinningModel(const Instance& inst, const MISFamily& family, const CoverDistribution& cover, const SimConfig& cfg)
        : inst_(inst), cfg_(cfg), verts_(support(inst)), nv_(verts_.size()), fs_(family.sets.size()) {
        auto rep = validate_cover(family, cover);
        if (!rep.ok()) throw ValidationError(rep.violations);
        if (family.vertex_count != nv_) throw std::invalid_argument("family does not match the instance support");
        shape_ = codebook_shape(inst.q, cfg);
        if (cfg.mode == CodebookMode::explicit_codebook &&
            static_cast<double>(shape_.codewords) * cfg.n > explicit_symbol_guard)
            throw GuardError("explicit codebook would hold more than 2e7 symbols; use the lazy mode");

        std::vector<double> px(nv_);
        for (std::size_t v = 0; v < nv_; ++v) px[v] = inst.pmf[verts_[v]];
        source_cdf_ = cumulative(px);

        joint_wx_ = PairTable(fs_, nv_);
        std::vector<double> pw(fs_, 0.0);
        for (std::size_t v = 0; v < nv_; ++v)
            for (std::size_t w = 0; w < fs_; ++w) {
                joint_wx_.at(w, v) = px[v] * cover.rows[v][w];
                pw[w] += joint_wx_.at(w, v);
            }
        for (std::size_t w = 0; w < fs_; ++w)
            if (pw[w] > 0.0) {
                labels_.push_back(static_cast<std::uint32_t>(w));
                label_p_.push_back(pw[w]);
            }
        label_cdf_ = cumulative(label_p_);
        std::vector<double> full(fs_, 0.0);
        for (std::size_t k = 0; k < labels_.size(); ++k) full[labels_[k]] = label_p_[k];
        codeword_cdf_ = cumulative(full);

        const std::size_t k_users = inst.users.size();
        side_class_.resize(k_users);
        estimate_.resize(k_users);
        joint_ws_.resize(k_users);
        demand_.resize(k_users);
        for (std::size_t i = 0; i < k_users; ++i) {
            std::uint32_t classes = 0;
            side_class_[i] = side_classes(inst, i, verts_, &classes);
            joint_ws_[i] = PairTable(fs_, classes);
            for (std::size_t v = 0; v < nv_; ++v)
                for (std::size_t w = 0; w < fs_; ++w) joint_ws_[i].at(w, side_class_[i][v]) += joint_wx_.at(w, v);
            estimate_[i].assign(fs_ * classes, -1);
            for (std::size_t w = 0; w < fs_; ++w)
                for (VertexId v : family.sets[w]) estimate_[i][w * classes + side_class_[i][v]] = inst.users[i].demand(verts_[v]);
            demand_[i].resize(nv_);
            for (std::size_t v = 0; v < nv_; ++v) demand_[i][v] = inst.users[i].demand(verts_[v]);
        }

        if (cfg.mode == CodebookMode::lazy) build_cell_tables();
    }

    const CodebookShape& shape() const { return shape_; }
    std::size_t users() const { return inst_.users.size(); }

    SimTrace run_trial(std::uint64_t trial) const {
        std::mt19937_64 rng(stream_seed(cfg_.seed, trial));
        const int n = cfg_.n;
        std::vector<std::uint32_t> x(n);
        for (auto& v : x) v = static_cast<std::uint32_t>(sample_discrete(rng, source_cdf_));

        TypicalityTest enc(joint_wx_, n, cfg_.epsilon_prime);
        TypicalityTest check(joint_wx_, n, cfg_.epsilon);
        std::vector<TypicalityTest> dec;
        std::vector<std::vector<std::uint32_t>> s(users(), std::vector<std::uint32_t>(n));
        for (std::size_t i = 0; i < users(); ++i) {
            dec.emplace_back(joint_ws_[i], n, cfg_.epsilon);
            for (int t = 0; t < n; ++t) s[i][t] = side_class_[i][x[t]];
        }

        SimTrace tr;
        tr.trial = trial;
        std::vector<std::uint32_t> w_star;
        // Per user: number of in-bin matches, and the first matching codeword.
        std::vector<int> matches(users(), 0);
        std::vector<std::int64_t> decoded(users(), -1);
        std::vector<std::vector<std::uint32_t>> decoded_seq(users());
        auto offer = [&](std::uint64_t index, const std::vector<std::uint32_t>& w) {
            bool open = false;
            for (std::size_t i = 0; i < users(); ++i) {
                if (matches[i] >= 2) continue;
                if (dec[i](w, s[i])) {
                    if (++matches[i] == 1) {
                        decoded[i] = static_cast<std::int64_t>(index);
                        decoded_seq[i] = w;
                    }
                }
                open = open || matches[i] < 2;
            }
            return open;
        };

        if (cfg_.mode == CodebookMode::explicit_codebook) {
            std::vector<std::vector<std::uint32_t>> book(shape_.codewords, std::vector<std::uint32_t>(n));
            std::vector<std::uint64_t> typical;
            for (std::uint64_t l = 0; l < shape_.codewords; ++l) {
                for (auto& w : book[l]) w = static_cast<std::uint32_t>(sample_discrete(rng, codeword_cdf_));
                if (enc(book[l], x)) typical.push_back(l);
            }
            tr.typical_codewords = typical.size();
            tr.l_star = typical.empty() ? 0 : typical[uniform_index(rng, typical.size())];
            tr.m_star = tr.l_star / shape_.bin_size;
            w_star = book[tr.l_star];
            const auto first = tr.m_star * shape_.bin_size;
            const auto last = std::min(first + shape_.bin_size, shape_.codewords);
            for (auto l = first; l < last; ++l)
                if (!offer(l, book[l])) break;
        } else {
            std::vector<int> cnt(nv_, 0);
            for (auto v : x) ++cnt[v];
            double p_typ = 1.0;
            for (std::size_t v = 0; v < nv_; ++v) p_typ *= cell_typical_probability(v, cnt[v]);
            std::uint64_t k = 0;
            if (p_typ >= 1.0) k = shape_.codewords;
            else if (p_typ > 0.0) k = std::binomial_distribution<std::uint64_t>(shape_.codewords, p_typ)(rng);
            tr.typical_codewords = k;
            tr.l_star = k == 0 ? 0 : uniform_index(rng, shape_.codewords);
            tr.m_star = tr.l_star / shape_.bin_size;
            w_star = k == 0 ? sample_atypical(rng, x, enc) : sample_typical(rng, x, cnt);

            // Other codewords: k - 1 (or none) of the remaining L - 1 are
            // typical; the bin takes them without replacement.
            std::uint64_t pool = shape_.codewords - 1;
            std::uint64_t typical_left = k == 0 ? 0 : k - 1;
            const auto first = tr.m_star * shape_.bin_size;
            const auto last = std::min(first + shape_.bin_size, shape_.codewords);
            bool open = offer(tr.l_star, w_star);
            for (auto l = first; l < last && open; ++l) {
                if (l == tr.l_star) continue;
                const bool typ = uniform_index(rng, pool) < typical_left;
                --pool;
                if (typ) --typical_left;
                const auto w = typ ? sample_typical(rng, x, cnt) : sample_atypical(rng, x, enc);
                open = offer(l, w);
            }
            // In explicit mode offers happen in index order; here l* goes
            // first. Decoding only depends on the count of matches and on the
            // single match when there is one, so the order is immaterial.
        }

        const bool star_typical = check(w_star, x);
        const auto sp = inst_.space();
        for (int t = 0; t < n; ++t) {
            if (t) tr.source += ' ';
            tr.source += sp.format(verts_[x[t]]);
        }
        for (std::size_t i = 0; i < users(); ++i) {
            const auto classes = joint_ws_[i].cols;
            bool correct = matches[i] == 1;
            std::string est;
            if (matches[i] == 1) {
                for (int t = 0; t < n; ++t) {
                    const int e = estimate_[i][decoded_seq[i][t] * classes + s[i][t]];
                    est += std::to_string(std::max(0, e));
                    if (e < 0 || e != demand_[i][x[t]]) correct = false;
                }
            }
            ErrorClass ec = ErrorClass::none;
            if (!correct) {
                if (tr.typical_codewords == 0) ec = ErrorClass::er1;
                else if (!star_typical) ec = ErrorClass::er2;
                else ec = ErrorClass::er3;
            }
            tr.decoded.push_back(matches[i] == 1 ? decoded[i] : -1);
            tr.estimate.push_back(std::move(est));
            tr.error.push_back(ec);
        }
        return tr;
    }

private:
    // Probability that positions holding source vertex v (cnt of them) get
    // labels consistent with eps'-typicality, when labels are i.i.d. P_W.
    // tables_[v][k][r]: labels k.. fill r positions within their ranges.
    void build_cell_tables() {
        const int n = cfg_.n;
        const std::size_t nl = labels_.size();
        std::vector<double> rem(nl + 1, 0.0);
        for (std::size_t k = nl; k-- > 0;) rem[k] = rem[k + 1] + label_p_[k];
        theta_.assign(nl, 1.0);
        for (std::size_t k = 0; k < nl; ++k) theta_[k] = k + 1 == nl ? 1.0 : std::min(1.0, label_p_[k] / rem[k]);
        tables_.assign(nv_, {});
        range_.assign(nv_, std::vector<std::pair<int, int>>(nl));
        for (std::size_t v = 0; v < nv_; ++v) {
            for (std::size_t k = 0; k < nl; ++k) {
                const double p = joint_wx_.at(labels_[k], v);
                range_[v][k] = p > 0.0 ? typical_count_range(p, n, cfg_.epsilon_prime) : std::pair<int, int>{0, 0};
            }
            auto& g = tables_[v];
            g.assign(nl + 1, std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
            g[nl][0] = 1.0;
            for (std::size_t k = nl; k-- > 0;)
                for (int r = 0; r <= n; ++r) {
                    double acc = 0.0;
                    const auto [lo, hi] = range_[v][k];
                    for (int c = lo; c <= std::min(hi, r); ++c) acc += binom_pmf(c, r, theta_[k]) * g[k + 1][r - c];
                    g[k][r] = acc;
                }
        }
    }

    double binom_pmf(int c, int r, double theta) const {
        if (theta >= 1.0) return c == r ? 1.0 : 0.0;
        if (theta <= 0.0) return c == 0 ? 1.0 : 0.0;
        const auto lf = [](int m) { return std::lgamma(static_cast<double>(m) + 1.0); };
        return std::exp(lf(r) - lf(c) - lf(r - c) + c * std::log(theta) + (r - c) * std::log1p(-theta));
    }

    double cell_typical_probability(std::size_t v, int count) const { return tables_[v][0][count]; }

    std::vector<std::uint32_t> sample_typical(std::mt19937_64& rng, const std::vector<std::uint32_t>& x,
                                              const std::vector<int>& cnt) const {
        const int n = cfg_.n;
        std::vector<std::uint32_t> w(n);
        std::vector<std::vector<int>> positions(nv_);
        for (int t = 0; t < n; ++t) positions[x[t]].push_back(t);
        std::vector<double> weight;
        std::vector<std::uint32_t> fill;
        for (std::size_t v = 0; v < nv_; ++v) {
            if (cnt[v] == 0) continue;
            const auto& g = tables_[v];
            fill.clear();
            int r = cnt[v];
            for (std::size_t k = 0; k < labels_.size(); ++k) {
                const auto [lo, hi] = range_[v][k];
                weight.clear();
                for (int c = lo; c <= std::min(hi, r); ++c)
                    weight.push_back(binom_pmf(c, r, theta_[k]) * g[k + 1][r - c]);
                if (weight.empty()) throw std::logic_error("typical sampling reached an empty range");
                const int c = lo + static_cast<int>(sample_discrete(rng, cumulative(weight)));
                fill.insert(fill.end(), static_cast<std::size_t>(c), labels_[k]);
                r -= c;
            }
            for (std::size_t j = fill.size(); j > 1; --j) std::swap(fill[j - 1], fill[uniform_index(rng, j)]);
            for (std::size_t j = 0; j < fill.size(); ++j) w[positions[v][j]] = fill[j];
        }
        return w;
    }

    std::vector<std::uint32_t> sample_atypical(std::mt19937_64& rng, const std::vector<std::uint32_t>& x,
                                               TypicalityTest& enc) const {
        std::vector<std::uint32_t> w(cfg_.n);
        for (std::uint64_t attempt = 0; attempt < 10'000'000; ++attempt) {
            for (auto& s : w) s = labels_[sample_discrete(rng, label_cdf_)];
            if (!enc(w, x)) return w;
        }
        throw GuardError("could not draw a non-typical codeword; typicality probability is too close to 1");
    }

    const Instance& inst_;
    SimConfig cfg_;
    std::vector<TupleId> verts_;
    std::size_t nv_;
    std::size_t fs_;
    CodebookShape shape_;
    std::vector<double> source_cdf_;
    PairTable joint_wx_;
    std::vector<std::uint32_t> labels_;      // sets with positive P_W
    std::vector<double> label_p_;
    std::vector<double> label_cdf_;
    std::vector<double> codeword_cdf_;        // over all sets
    std::vector<std::vector<std::uint32_t>> side_class_;
    std::vector<PairTable> joint_ws_;
    std::vector<std::vector<int>> estimate_;  // [user][w * classes + c]
    std::vector<std::vector<int>> demand_;    // [user][vertex]
    std::vector<double> theta_;
    std::vector<std::vector<std::pair<int, int>>> range_;
    std::vector<std::vector<std::vector<double>>> tables_;
};

} // namespace detail

/// Runs cfg.trials independent trials. Trial k uses its own RNG stream
/// derived from (seed, k), so results do not depend on the thread count.
inline SimSummary binning_simulate(const Instance& inst, const MISFamily& family, const CoverDistribution& cover,
                                   const SimConfig& cfg) {
    require_valid(inst);
    auto vs = validate_sim_config(cfg);
    if (!vs.empty()) throw ValidationError(std::move(vs));
    const detail::BinningModel model(inst, family, cover, cfg);

    std::vector<SimTrace> traces(cfg.trials);
    parallel_for(cfg.trials, cfg.threads, [&](std::size_t k) { traces[k] = model.run_trial(k); });

    SimSummary sum;
    sum.config = cfg;
    sum.shape = model.shape();
    sum.trials = cfg.trials;
    sum.per_user.assign(inst.users.size(), {});
    for (const auto& tr : traces) {
        bool any = false;
        for (std::size_t i = 0; i < tr.error.size(); ++i) {
            switch (tr.error[i]) {
            case ErrorClass::er1: ++sum.per_user[i].er1; break;
            case ErrorClass::er2: ++sum.per_user[i].er2; break;
            case ErrorClass::er3: ++sum.per_user[i].er3; break;
            case ErrorClass::none: break;
            }
            any = any || tr.error[i] != ErrorClass::none;
        }
        if (any) ++sum.trials_with_error;
    }
    if (cfg.keep_traces) sum.traces = std::move(traces);
    return sum;
}

} // namespace cbcast
