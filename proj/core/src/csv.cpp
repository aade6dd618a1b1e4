#include "rcs/csv.hpp"

#include <cstdio>

namespace rcs {

std::string format_g(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows, double prior_s) {
    std::string out = "# D_dB = 10*log10(D/s), s = " + format_g(prior_s) +
                      " (prior second moment, unit-variance nonzeros)\r\n";
    out += "solver,lambda,rate,chi,q,p,mu,xi,f,w,D,D_dB,status,iterations\r\n";
    for (const auto& r : rows) {
        out += csv_field(r.solver);
        out += ',';
        out += format_g(r.lambda);
        out += ',';
        out += format_g(r.rate);
        out += ',';
        out += format_g(r.chi);
        out += ',';
        out += format_g(r.q);
        out += ',';
        out += format_g(r.p);
        out += ',';
        out += format_g(r.mu);
        out += ',';
        out += format_g(r.xi);
        out += ',';
        out += format_g(r.f);
        out += ',';
        out += format_g(r.w);
        out += ',';
        out += format_g(r.D);
        out += ',';
        out += format_g(r.D_dB);
        out += ',';
        out += csv_field(to_string(r.status));
        out += ',';
        out += std::to_string(r.iterations);
        out += "\r\n";
    }
    return out;
}

std::string trials_csv(const SimReport& rep) {
    std::string out = "trial,distortion\r\n";
    for (size_t i = 0; i < rep.per_trial.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += format_g(rep.per_trial[i]);
        out += "\r\n";
    }
    return out;
}

}  // namespace rcs
