#include "spinsim/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "format.hpp"

namespace spinsim {

void CouplingMatrix::validate() const {
    if (n < 2) throw std::invalid_argument("coupling matrix needs at least 2 sites");
    if (j.rows() != n || j.cols() != n)
        throw std::invalid_argument("coupling matrix shape mismatch");
    if (static_cast<int>(positions.size()) != n)
        throw std::invalid_argument("positions size mismatch");
    for (int i = 0; i < n; ++i) {
        if (j(i, i) != 0.0) throw std::invalid_argument("coupling diagonal must be zero");
        for (int k = 0; k < n; ++k) {
            if (!std::isfinite(j(i, k)))
                throw std::invalid_argument("non-finite coupling entry");
            if (j(i, k) != j(k, i))
                throw std::invalid_argument("coupling matrix must be symmetric");
        }
    }
    for (int i = 1; i < n; ++i)
        if (!(positions[i] > positions[i - 1]))
            throw std::invalid_argument("positions must be strictly increasing");
}

CouplingMatrix power_law_couplings(int n, double j0, double alpha) {
    if (n < 2) throw std::invalid_argument("power_law_couplings: n must be >= 2");
    if (!std::isfinite(j0) || j0 <= 0.0)
        throw std::invalid_argument("power_law_couplings: j0 must be positive and finite");
    if (!std::isfinite(alpha) || alpha < 0.0 || alpha >= 3.0)
        throw std::invalid_argument("power_law_couplings: alpha must be in [0, 3)");
    CouplingMatrix c;
    c.n = n;
    c.j = Eigen::MatrixXd::Zero(n, n);
    c.positions.resize(n);
    for (int i = 0; i < n; ++i) c.positions[i] = static_cast<double>(i);
    for (int i = 0; i < n; ++i)
        for (int k = i + 1; k < n; ++k) {
            double v = j0 * std::pow(static_cast<double>(k - i), -alpha);
            c.j(i, k) = v;
            c.j(k, i) = v;
        }
    return c;
}

namespace {

std::vector<double> parse_csv_row(const std::string& line, const std::string& path) {
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            size_t pos = 0;
            double v = std::stod(cell, &pos);
            // allow trailing whitespace only
            while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos]))) ++pos;
            if (pos != cell.size()) throw std::invalid_argument("");
            row.push_back(v);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": malformed CSV cell '" + cell + "'");
        }
    }
    return row;
}

}  // namespace

CouplingMatrix load_couplings(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open coupling file: " + path);

    std::vector<double> positions;
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (first && line.rfind("# positions:", 0) == 0) {
            positions = parse_csv_row(line.substr(12), path);
            first = false;
            continue;
        }
        first = false;
        rows.push_back(parse_csv_row(line, path));
    }
    if (rows.empty()) throw std::runtime_error(path + ": empty coupling file");
    const int n = static_cast<int>(rows.size());
    for (const auto& r : rows)
        if (static_cast<int>(r.size()) != n)
            throw std::runtime_error(path + ": non-square coupling matrix");

    Eigen::MatrixXd raw(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            if (!std::isfinite(rows[i][k]))
                throw std::runtime_error(path + ": non-finite coupling entry");
            raw(i, k) = rows[i][k];
        }

    double scale = std::max(raw.cwiseAbs().maxCoeff(), 1e-300);
    double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff() / scale;
    if (asym > 1e-9)
        std::cerr << "warning: coupling matrix " << path
                  << " asymmetric (relative " << asym << "), symmetrizing\n";

    CouplingMatrix c;
    c.n = n;
    c.j = 0.5 * (raw + raw.transpose());
    c.j.diagonal().setZero();
    if (positions.empty()) {
        c.positions.resize(n);
        for (int i = 0; i < n; ++i) c.positions[i] = static_cast<double>(i);
    } else {
        if (static_cast<int>(positions.size()) != n)
            throw std::runtime_error(path + ": positions row size mismatch");
        c.positions = positions;
    }
    c.validate();
    return c;
}

void save_couplings(const CouplingMatrix& c, const std::string& path) {
    c.validate();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write coupling file: " + path);
    out << "# positions: ";
    for (int i = 0; i < c.n; ++i)
        out << (i ? "," : "") << detail::format_double(c.positions[i]);
    out << "\n";
    for (int i = 0; i < c.n; ++i) {
        for (int k = 0; k < c.n; ++k)
            out << (k ? "," : "") << detail::format_double(c.j(i, k));
        out << "\n";
    }
}

double mean_coupling(const CouplingMatrix& c) {
    c.validate();
    double sum = 0.0;
    for (int i = 0; i < c.n; ++i)
        for (int k = i + 1; k < c.n; ++k) sum += c.j(i, k);
    return 2.0 * sum / (static_cast<double>(c.n) * (c.n - 1));
}

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::OAT: return "oat";
        case ModelKind::PLIsing: return "ising";
        case ModelKind::PLXX: return "xx";
        case ModelKind::PLTFI: return "tfi";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "oat") return ModelKind::OAT;
    if (s == "ising") return ModelKind::PLIsing;
    if (s == "xx") return ModelKind::PLXX;
    if (s == "tfi") return ModelKind::PLTFI;
    throw std::invalid_argument("unknown model kind: " + s);
}

void ModelSpec::validate() const {
    if (gamma_z < 0.0 || !std::isfinite(gamma_z))
        throw std::invalid_argument("gamma_z must be >= 0");
    if (kind == ModelKind::OAT) {
        if (chi <= 0.0 || !std::isfinite(chi))
            throw std::invalid_argument("OAT requires chi > 0");
        if (n_oat < 1) throw std::invalid_argument("OAT requires a site count");
    } else {
        couplings.validate();
    }
    if (kind != ModelKind::PLTFI && b_field != 0.0)
        throw std::invalid_argument("b_field only applies to the TFI model");
}

void Schedule::validate() const {
    if (sample_times.empty())
        throw std::invalid_argument("schedule needs at least one sample time");
    if (sample_times.front() < 0.0)
        throw std::invalid_argument("sample times must be >= 0");
    if (sample_times.back() > t_end * (1 + 1e-12))
        throw std::invalid_argument("sample times must not exceed t_end");
    for (size_t i = 1; i < sample_times.size(); ++i)
        if (!(sample_times[i] > sample_times[i - 1]))
            throw std::invalid_argument("sample times must be strictly increasing");
}

Schedule Schedule::uniform(double t_end, int n_samples, bool include_zero) {
    if (n_samples < 1 || t_end <= 0.0)
        throw std::invalid_argument("invalid uniform schedule");
    Schedule s;
    s.t_end = t_end;
    int first = include_zero ? 0 : 1;
    for (int i = first; i <= n_samples; ++i)
        s.sample_times.push_back(t_end * i / n_samples);
    return s;
}

double cat_time(int q, double jbar) {
    if (q < 2) throw std::invalid_argument("cat_time: q must be >= 2");
    if (!(jbar > 0.0)) throw std::invalid_argument("cat_time: jbar must be > 0");
    return std::numbers::pi / (q * jbar);
}

}  // namespace spinsim
