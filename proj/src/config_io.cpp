#include "tbeam/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tbeam {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    return os;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file: " + path);

    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        std::size_t used = 0;
        double num = 0.0;
        try {
            num = std::stod(val, &used);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + val + "'");
        }
        if (used != val.size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": bad number '" + val + "'");

        if (key == "epsilon") cfg.beam.epsilon = num;
        else if (key == "mu") cfg.beam.mu = num;
        else if (key == "a") cfg.beam.a = num;
        else if (key == "theta") cfg.beam.theta = num;
        else if (key == "xi") cfg.beam.xi = num;
        else if (key == "delta1") cfg.ctrl.delta1 = num;
        else if (key == "delta2") cfg.ctrl.delta2 = num;
        else if (key == "n") cfg.n = static_cast<int>(num);
        else if (key == "dt_cfl") cfg.cfl = num;
        else if (key == "t_final") cfg.t_final = num;
        else throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    return cfg;
}

void write_gains_csv(const std::string& path, const GainSet& gains) {
    auto os = open_out(path);
    os << "y,k11,k12,k21,k22,l11,l12,l21,l22\n";
    for (int j = 0; j <= gains.n; ++j) {
        const Mat2& k = gains.K1[j];
        const Mat2& l = gains.L1[j];
        os << fmt(j * gains.h) << ',' << fmt(k.m00) << ',' << fmt(k.m01) << ',' << fmt(k.m10)
           << ',' << fmt(k.m11) << ',' << fmt(l.m00) << ',' << fmt(l.m01) << ',' << fmt(l.m10)
           << ',' << fmt(l.m11) << '\n';
    }
}

void write_phi_csv(const std::string& path, const KernelSolution& sol) {
    auto os = open_out(path);
    os << "x,phi11,phi12,phi21,phi22\n";
    for (int i = 0; i <= sol.n; ++i) {
        const Mat2& p = sol.phi[i];
        os << fmt(i * sol.h) << ',' << fmt(p.m00) << ',' << fmt(p.m01) << ',' << fmt(p.m10)
           << ',' << fmt(p.m11) << '\n';
    }
}

void write_snapshots_csv(const std::string& path, const TimeSeries& series,
                         const SpatialGrid& grid) {
    auto os = open_out(path);
    os << "t,x,u,alpha,ut,alphat\n";
    for (const Snapshot& snap : series.snapshots) {
        for (int i = 0; i <= grid.n; ++i) {
            os << fmt(snap.t) << ',' << fmt(grid.node(i)) << ',' << fmt(snap.ps.u[i]) << ','
               << fmt(snap.ps.alpha[i]) << ',' << fmt(snap.ps.ut[i]) << ','
               << fmt(snap.ps.alphat[i]) << '\n';
        }
    }
}

void write_energy_csv(const std::string& path, const TimeSeries& series,
                      const std::vector<double>& vlyap) {
    auto os = open_out(path);
    os << "t,E_h1,V_lyap,Vp,Vr\n";
    for (std::size_t s = 0; s < series.snapshots.size(); ++s) {
        const Snapshot& snap = series.snapshots[s];
        const double v = s < vlyap.size() ? vlyap[s] : std::nan("");
        os << fmt(snap.t) << ',' << fmt(series.energy[snap.step]) << ',' << fmt(v) << ','
           << fmt(series.Vp[snap.step]) << ',' << fmt(series.Vr[snap.step]) << '\n';
    }
}

void write_controls_csv(const std::string& path, const TimeSeries& series,
                        const BeamParams& params) {
    auto os = open_out(path);
    const double se = std::sqrt(params.epsilon);
    const double sm = std::sqrt(params.mu);
    os << "t,Vp,Vr,V1,V2\n";
    for (std::size_t k = 0; k < series.times.size(); ++k) {
        const double v1 = series.Vp[k] - se * series.ut1[k];
        const double v2 = series.Vr[k] - sm * series.alphat1[k];
        os << fmt(series.times[k]) << ',' << fmt(series.Vp[k]) << ',' << fmt(series.Vr[k]) << ','
           << fmt(v1) << ',' << fmt(v2) << '\n';
    }
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    auto os = open_out(path);
    os << "delta1,delta2,C2,fitted_rate,final_energy_ratio\n";
    for (const SweepRow& r : rows) {
        const double nanv = std::nan("");
        os << fmt(r.delta1) << ',' << fmt(r.delta2) << ',' << fmt(r.valid ? r.c2 : nanv) << ','
           << fmt(r.valid ? r.fitted_rate : nanv) << ','
           << fmt(r.valid ? r.final_energy_ratio : nanv) << '\n';
    }
}

LoadedGains load_gains_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open gains file: " + path);
    LoadedGains g;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty gains file: " + path);
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        double vals[9];
        for (int c = 0; c < 9; ++c) {
            if (!std::getline(ls, cell, ','))
                throw std::runtime_error("bad gains row: " + line);
            vals[c] = std::stod(cell);
        }
        g.y.push_back(vals[0]);
        g.K1.push_back({vals[1], vals[2], vals[3], vals[4]});
        g.L1.push_back({vals[5], vals[6], vals[7], vals[8]});
    }
    return g;
}

}  // namespace tbeam
