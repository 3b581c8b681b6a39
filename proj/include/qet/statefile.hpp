#pragma once

#include <string>

#include <json.hpp>

#include "qet/semantics.hpp"

namespace qet {

struct InitialState {
    Store store;
    Density rho;
};

// JSON initial-state file:
//   { "store": { "x": 0, "i": 3 },
//     "rho":   [["1/2", "1/2*w - 1/2*w^3"], ["..."]] }
// Matrix entries use the textual field-element form; integer JSON numbers
// are accepted as well.  Missing store entries default to zero.  The matrix
// is fully validated (hermitian, unit trace, positive semidefinite).
inline InitialState load_state(const std::string& text, const Program& p) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("state file: ") + e.what());
    }
    InitialState out{Store::zeros(p), Density::ket0(p.qubit_count())};

    if (j.contains("store")) {
        for (auto it = j["store"].begin(); it != j["store"].end(); ++it) {
            const std::string& name = it.key();
            int id = -1;
            for (std::size_t i = 0; i < p.bool_vars.size(); ++i)
                if (p.bool_vars[i] == name) id = static_cast<int>(i);
            for (std::size_t i = 0; i < p.nat_vars.size(); ++i)
                if (p.nat_vars[i] == name) id = static_cast<int>(p.bool_vars.size() + i);
            if (id < 0)
                throw std::invalid_argument("state file: unknown variable '" + name + "'");
            Int value;
            if (it.value().is_number_integer()) {
                value = Int(static_cast<long>(it.value().get<long long>()));
            } else if (it.value().is_boolean()) {
                value = it.value().get<bool>() ? 1 : 0;
            } else if (it.value().is_string()) {
                value = Int(it.value().get<std::string>());
            } else {
                throw std::invalid_argument("state file: bad value for '" + name + "'");
            }
            bool is_bool = id < static_cast<int>(p.bool_vars.size());
            if (value < 0 || (is_bool && value > 1))
                throw std::invalid_argument("state file: value out of range for '" + name + "'");
            out.store.values.at(id) = value;
        }
    }

    if (j.contains("rho")) {
        const auto& rows = j["rho"];
        const std::size_t dim = std::size_t(1) << p.qubit_count();
        if (!rows.is_array() || rows.size() != dim)
            throw std::invalid_argument("state file: rho must be a " + std::to_string(dim) +
                                        "x" + std::to_string(dim) + " matrix");
        CMat m(dim);
        for (std::size_t r = 0; r < dim; ++r) {
            if (!rows[r].is_array() || rows[r].size() != dim)
                throw std::invalid_argument("state file: rho row " + std::to_string(r) +
                                            " has the wrong length");
            for (std::size_t c = 0; c < dim; ++c) {
                const auto& cell = rows[r][c];
                if (cell.is_number_integer())
                    m.at(r, c) = QOmega(static_cast<long>(cell.get<long long>()));
                else if (cell.is_string())
                    m.at(r, c) = parse_qomega(cell.get<std::string>());
                else
                    throw std::invalid_argument("state file: bad rho entry");
            }
        }
        out.rho = Density::validated(m);
    }
    return out;
}

// Named presets: ket0 / ketplus, optionally suffixed ^m (checked against
// the program's register size).
inline InitialState preset_state(const std::string& name, const Program& p) {
    std::string base = name;
    auto caret = name.find('^');
    if (caret != std::string::npos) {
        base = name.substr(0, caret);
        int m = std::stoi(name.substr(caret + 1));
        if (m != p.qubit_count())
            throw std::invalid_argument("preset '" + name + "' does not match the " +
                                        std::to_string(p.qubit_count()) + "-qubit register");
    }
    InitialState out{Store::zeros(p), Density::ket0(p.qubit_count())};
    if (base == "ket0")
        out.rho = Density::ket0(p.qubit_count());
    else if (base == "ketplus")
        out.rho = Density::ketplus(p.qubit_count());
    else
        throw std::invalid_argument("unknown preset '" + name + "' (try ket0 or ketplus)");
    return out;
}

inline std::string format_store(const Store& s, const Program& p) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (i) out += ", ";
        out += p.classical_name(static_cast<int>(i)) + ":=" + s.values[i].get_str();
    }
    return out + "}";
}

inline std::string format_density(const Density& rho) {
    std::string out = "[";
    for (std::size_t j = 0; j < rho.dim(); ++j) {
        if (j) out += ", ";
        out += "[";
        for (std::size_t k = 0; k < rho.dim(); ++k) {
            if (k) out += ", ";
            out += rho.entry(j, k).str();
        }
        out += "]";
    }
    return out + "]";
}

}  // namespace qet
