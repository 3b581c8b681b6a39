#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qet/encode.hpp"
#include "qet/sample.hpp"

namespace qet {

// Map from expectation variables to polynomial expectations; -1 keys the
// post variable X.
struct Assignment {
    TemplateMap templates;

    // Wraps the polynomials as evaluable expectations.
    Interpretation interpret(const StateSig& sig) const {
        Interpretation interp;
        for (const auto& [label, poly] : templates) {
            Expectation f = [poly, &sig](const Store& s, const Density& rho) {
                return poly.eval(sig.encode_state(s, rho));
            };
            if (label < 0)
                interp.post = std::move(f);
            else
                interp.labels[label] = std::move(f);
        }
        return interp;
    }

    // Checks coverage of every expectation variable of the constraint set.
    void require_complete(const std::vector<Constraint>& cs) const {
        if (!templates.count(-1))
            throw EncodeError("assignment is missing the post-expectation X");
        for (const auto& c : cs)
            if (!templates.count(c.rhs_label))
                throw EncodeError("assignment is missing X_" + std::to_string(c.rhs_label));
    }
};

// Parses an assignment file: one `X_<label> := <polynomial>` per line
// (`X := ...` for the post variable); blank lines and # comments ignored.
inline Assignment parse_assignment(const std::string& text, const StateSig& sig) {
    Assignment out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto assign = line.find(":=");
        if (assign == std::string::npos)
            throw EncodeError("line " + std::to_string(lineno) +
                              ": expected `X_<label> := <polynomial>`");
        std::string head = line.substr(0, assign);
        std::string body = line.substr(assign + 2);
        head.erase(0, head.find_first_not_of(" \t"));
        head.erase(head.find_last_not_of(" \t") + 1);
        int label;
        if (head == "X")
            label = -1;
        else if (head.rfind("X_", 0) == 0)
            label = std::stoi(head.substr(2));
        else
            throw EncodeError("line " + std::to_string(lineno) + ": bad variable '" + head + "'");
        if (out.templates.count(label))
            throw EncodeError("line " + std::to_string(lineno) + ": duplicate " + head);
        out.templates.emplace(label, parse_poly(body, sig));
    }
    return out;
}

// Verdict of sampling-based refutation.  NotRefuted is evidence, not proof;
// a refutation carries the witness state and the violated side-condition.
struct CheckResult {
    bool refuted = false;
    int sample_index = -1;
    int constraint_index = -1;
    SampledState witness;

    explicit operator bool() const { return !refuted; }
};

// Evaluates every (constraint, sampled state) pair exactly.  With jobs > 1
// the sample range is partitioned across threads; the reported witness is
// the one with the smallest sample index either way.
inline CheckResult check_assignment(const Program& p, const Assignment& alpha,
                                    const std::vector<Constraint>& constraints,
                                    const std::vector<SampledState>& samples, int jobs = 1) {
    StateSig sig = StateSig::of(p);
    alpha.require_complete(constraints);
    Interpretation interp = alpha.interpret(sig);

    auto scan = [&](std::size_t lo, std::size_t hi) -> std::optional<std::pair<int, int>> {
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t c = 0; c < constraints.size(); ++c) {
                Verdict v = check_constraint(constraints[c], interp, samples[i].store,
                                             samples[i].rho, p);
                if (v == Verdict::Violated)
                    return std::make_pair(static_cast<int>(i), static_cast<int>(c));
            }
        }
        return std::nullopt;
    };

    std::optional<std::pair<int, int>> hit;
    if (jobs <= 1 || samples.size() < 2) {
        hit = scan(0, samples.size());
    } else {
        const int workers = std::min<int>(jobs, static_cast<int>(samples.size()));
        std::vector<std::optional<std::pair<int, int>>> results(workers);
        std::vector<std::thread> threads;
        const std::size_t chunk = (samples.size() + workers - 1) / workers;
        for (int w = 0; w < workers; ++w) {
            std::size_t lo = w * chunk, hi = std::min(samples.size(), lo + chunk);
            threads.emplace_back([&, w, lo, hi] { results[w] = scan(lo, hi); });
        }
        for (auto& t : threads) t.join();
        for (const auto& r : results)
            if (r && (!hit || r->first < hit->first)) hit = r;
    }

    CheckResult out;
    if (hit) {
        out.refuted = true;
        out.sample_index = hit->first;
        out.constraint_index = hit->second;
        out.witness = samples[hit->first];
    }
    return out;
}

}  // namespace qet
