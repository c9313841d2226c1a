#pragma once

// Flat key = value text files: models and run configurations.
//
// Model file keys:
//   n = 3
//   A = -1 0 0; 0 -2 0; 0 0 -3      rows separated by ';', entries by spaces or commas
//   B = 1 0 0; 0 1 0; 0 0 1         n x m
//   gamma = -1                      optional eigenvalue of A^T (real or a+bi)
//   x0 = 1 0 0                      optional eigenvector (real part)
//   x0_im = 0 0 0                   optional imaginary part
// Without gamma the eigenvalue of A^T with the largest real part is used.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <complex>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <tuple>
#include <string>
#include <vector>

#include "oulab/builtins.hpp"

namespace oulab {

/// Ordered key/value pairs; later duplicates override earlier ones.
class KeyValues {
public:
    static KeyValues parse(std::istream& in, const std::string& origin) {
        KeyValues kv;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const std::string s = trim(line);
            if (s.empty()) continue;
            const auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
            const std::string key = trim(s.substr(0, eq));
            if (key.empty()) throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
            kv.set(key, trim(s.substr(eq + 1)));
        }
        return kv;
    }

    static KeyValues load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open '" + path + "'");
        return parse(in, path);
    }

    void set(const std::string& key, const std::string& value) {
        if (!values_.count(key)) order_.push_back(key);
        values_[key] = value;
    }
    bool has(const std::string& key) const { return values_.count(key) > 0; }
    const std::string& get(const std::string& key) const {
        const auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
        return it->second;
    }
    const std::vector<std::string>& keys() const { return order_; }

    /// Fails on keys outside `allowed`.
    void require_known(const std::vector<std::string>& allowed, const std::string& origin) const {
        for (const auto& k : order_)
            if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
                throw ConfigError(origin + ": unknown key '" + k + "'");
    }

    static std::string trim(const std::string& s) {
        const auto b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return {};
        const auto e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

private:
    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
};

inline double parse_real(const std::string& text, const std::string& what) {
    const std::string s = KeyValues::trim(text);
    double v = 0.0;
    const char* first = s.data();
    if (!s.empty() && s[0] == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(what + ": cannot parse '" + s + "' as a number");
    if (!std::isfinite(v)) throw ConfigError(what + ": value must be finite");
    return v;
}

inline long long parse_integer(const std::string& text, const std::string& what) {
    const std::string s = KeyValues::trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ConfigError(what + ": cannot parse '" + s + "' as an integer");
    return v;
}

/// "a", "bi", "a+bi", "a-bi", "i", "-i" (j accepted for i).
inline cplx parse_complex(const std::string& text, const std::string& what) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += (c == 'j' ? 'i' : c);
    static const std::regex full(R"(^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)([+-](?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)i$)");
    static const std::regex imag(R"(^([+-]?(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?)i$)");
    std::smatch m;
    auto coef = [&](const std::string& c) {
        if (c.empty() || c == "+") return 1.0;
        if (c == "-") return -1.0;
        return parse_real(c, what);
    };
    if (std::regex_match(s, m, full)) return {parse_real(m[1], what), coef(m[2])};
    if (std::regex_match(s, m, imag)) return {0.0, coef(m[1])};
    if (s.empty() || s.back() == 'i') throw ConfigError(what + ": cannot parse '" + text + "' as a complex number");
    return {parse_real(s, what), 0.0};
}

inline std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::string s = text;
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) out.push_back(parse_real(tok, what));
    return out;
}

/// Rows separated by ';'.
inline Mat parse_matrix(const std::string& text, const std::string& what) {
    std::vector<std::vector<double>> rows;
    std::string row;
    std::istringstream in(text);
    while (std::getline(in, row, ';')) {
        if (KeyValues::trim(row).empty()) continue;
        rows.push_back(parse_list(row, what));
    }
    if (rows.empty()) throw ConfigError(what + ": empty matrix");
    const std::size_t cols = rows.front().size();
    for (const auto& r : rows)
        if (r.size() != cols) throw ConfigError(what + ": rows have different lengths");
    Mat m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    return m;
}

/// Eigenvalue of A^T with the largest real part (Im >= 0 for a complex pair) and its eigenvector.
inline std::pair<cplx, CVec> leading_eigenpair(const Mat& a) {
    Eigen::EigenSolver<Mat> es(a.transpose());
    if (es.info() != Eigen::Success) throw NumericError("eigen decomposition of A^T failed");
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < a.rows(); ++i) {
        const cplx l = es.eigenvalues()(i), b = es.eigenvalues()(best);
        if (l.real() > b.real() + 1e-12 || (std::abs(l.real() - b.real()) <= 1e-12 && l.imag() > b.imag())) best = i;
    }
    cplx g = es.eigenvalues()(best);
    CVec v = es.eigenvectors().col(best);
    if (std::abs(g.imag()) <= 1e-12 * std::abs(g)) {
        g = g.real();
        // a real eigenvector: rotate the phase onto the real axis
        const Eigen::Index k = [&] {
            Eigen::Index i;
            v.cwiseAbs().maxCoeff(&i);
            return i;
        }();
        v *= std::abs(v(k)) / v(k);
        v = v.real().cast<cplx>();
    }
    return {g, v};
}

inline ModelSource model_from_keys(const KeyValues& kv, const std::string& origin) {
    kv.require_known({"n", "m", "A", "B", "gamma", "x0", "x0_im"}, origin);
    const Mat a = parse_matrix(kv.get("A"), origin + ": A");
    const Mat b = parse_matrix(kv.get("B"), origin + ": B");
    if (kv.has("n") && parse_integer(kv.get("n"), origin + ": n") != a.rows())
        throw ConfigError(origin + ": n does not match the size of A");
    if (kv.has("m") && parse_integer(kv.get("m"), origin + ": m") != b.cols())
        throw ConfigError(origin + ": m does not match the columns of B");
    if (a.rows() != a.cols()) throw ConfigError(origin + ": A must be square");
    if (b.rows() != a.rows()) throw ConfigError(origin + ": B must have as many rows as A");
    ModelSource src{origin, OUModel(a, b), cplx(0.0), CVec()};
    if (!kv.has("gamma")) {
        if (kv.has("x0") || kv.has("x0_im")) throw ConfigError(origin + ": x0 given without gamma");
        std::tie(src.gamma, src.x0star) = leading_eigenpair(a);
        return src;
    }
    src.gamma = parse_complex(kv.get("gamma"), origin + ": gamma");
    if (!kv.has("x0")) {
        // eigenvector for the given eigenvalue from the kernel of A^T - gamma
        const CMat shifted = a.transpose().cast<cplx>() - src.gamma * CMat::Identity(a.rows(), a.cols());
        Eigen::FullPivLU<CMat> lu(shifted);
        lu.setThreshold(1e-8);
        const CMat ker = lu.kernel();
        if (lu.rank() == a.rows()) throw ConfigError(origin + ": gamma is not an eigenvalue of A^T");
        src.x0star = ker.col(0);
        if (src.gamma.imag() == 0.0) {
            Eigen::Index k;
            src.x0star.cwiseAbs().maxCoeff(&k);
            src.x0star *= std::abs(src.x0star(k)) / src.x0star(k);
            src.x0star = src.x0star.real().cast<cplx>();
        }
        return src;
    }
    const std::vector<double> re = parse_list(kv.get("x0"), origin + ": x0");
    std::vector<double> im(re.size(), 0.0);
    if (kv.has("x0_im")) im = parse_list(kv.get("x0_im"), origin + ": x0_im");
    if (Eigen::Index(re.size()) != a.rows() || im.size() != re.size())
        throw ConfigError(origin + ": x0 must have n entries");
    src.x0star.resize(a.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) src.x0star(i) = cplx(re[i], im[i]);
    return src;
}

inline ModelSource load_model(const std::string& path) { return model_from_keys(KeyValues::load(path), path); }

}  // namespace oulab
