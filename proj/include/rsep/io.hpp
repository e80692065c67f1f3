// Copyright 2026 The rsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/**
 * @file io.hpp
 * JSON encodings of matrices, states, bases, measurement sets and lattices.
 *
 * Matrices:  {"dim": n, "re": [[...]], "im": [[...]]}  (square)
 *            {"rows": r, "cols": c, "re": ..., "im": ...} (rectangular)
 * States:    {"dim": n, "re": [...], "im": [...]}
 * Bases:     {"D": n, "anchor": state, "elements": [matrix...],
 *             "construction": "aligned" | "phase_point" | "custom"}
 * M:         {"dim": d, "povms": [{"label": s, "elements": [matrix...]}...]}
 * Lattices:  {"n_sites": N, "edges": [[head, tail]...]}
 */
#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "lattice.hpp"
#include "measurement_dual.hpp"
#include "operator_basis.hpp"
#include "operator_core.hpp"

namespace rsep {

using json = nlohmann::json;

/// File could not be read or written.
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error &e) {
        throw ValidationError("'" + path.string() + "' is not valid JSON: " +
                              e.what());
    }
}

inline void write_text_file(const std::filesystem::path &path,
                            const std::string &text) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
    out << text;
    if (!out) {
        throw IoError("write to '" + path.string() + "' failed");
    }
}

inline void write_json_file(const std::filesystem::path &path, const json &j) {
    write_text_file(path, j.dump(2) + "\n");
}

inline json matrix_to_json(const ComplexMatrix &m) {
    json re = json::array();
    json im = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json rr = json::array();
        json ii = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            rr.push_back(m(r, c).real());
            ii.push_back(m(r, c).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    json out;
    if (m.rows() == m.cols()) {
        out["dim"] = m.rows();
    } else {
        out["rows"] = m.rows();
        out["cols"] = m.cols();
    }
    out["re"] = std::move(re);
    out["im"] = std::move(im);
    return out;
}

inline ComplexMatrix matrix_from_json(const json &j) {
    try {
        Eigen::Index rows = 0;
        Eigen::Index cols = 0;
        if (j.contains("dim")) {
            rows = cols = j.at("dim").get<Eigen::Index>();
        } else {
            rows = j.at("rows").get<Eigen::Index>();
            cols = j.at("cols").get<Eigen::Index>();
        }
        if (rows < 1 || cols < 1) {
            throw ValidationError("matrix literal: dimensions must be positive");
        }
        const auto &re = j.at("re");
        const bool has_im = j.contains("im");
        if (!re.is_array() || static_cast<Eigen::Index>(re.size()) != rows ||
            (has_im && static_cast<Eigen::Index>(j.at("im").size()) != rows)) {
            throw ValidationError("matrix literal: row count mismatch");
        }
        ComplexMatrix m(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
            const auto &rr = re.at(static_cast<std::size_t>(r));
            if (static_cast<Eigen::Index>(rr.size()) != cols) {
                throw ValidationError("matrix literal: column count mismatch");
            }
            for (Eigen::Index c = 0; c < cols; ++c) {
                const double x = rr.at(static_cast<std::size_t>(c)).get<double>();
                const double y =
                    has_im ? j.at("im")
                                 .at(static_cast<std::size_t>(r))
                                 .at(static_cast<std::size_t>(c))
                                 .get<double>()
                           : 0.0;
                m(r, c) = Complex(x, y);
            }
        }
        if (!m.allFinite()) {
            throw ValidationError("matrix literal: non-finite entry");
        }
        return m;
    } catch (const json::exception &e) {
        throw ValidationError(std::string("matrix literal: ") + e.what());
    }
}

inline json hermitian_to_json(const HermitianOperator &op) {
    return matrix_to_json(op.matrix());
}

inline HermitianOperator hermitian_from_json(const json &j) {
    return HermitianOperator(matrix_from_json(j));
}

inline json state_to_json(const PureState &s) {
    json re = json::array();
    json im = json::array();
    for (const auto &a : s.amplitudes()) {
        re.push_back(a.real());
        im.push_back(a.imag());
    }
    return {{"dim", s.dim()}, {"re", re}, {"im", im}};
}

/// Accepts unnormalized amplitudes only when @p normalize is set.
inline PureState state_from_json(const json &j, bool normalize = false) {
    try {
        const auto dim = j.at("dim").get<std::size_t>();
        const auto &re = j.at("re");
        if (re.size() != dim || (j.contains("im") && j.at("im").size() != dim)) {
            throw ValidationError("state literal: length mismatch");
        }
        ComplexVector v(static_cast<Eigen::Index>(dim));
        for (std::size_t i = 0; i < dim; ++i) {
            const double y = j.contains("im") ? j.at("im").at(i).get<double>() : 0.0;
            v(static_cast<Eigen::Index>(i)) = Complex(re.at(i).get<double>(), y);
        }
        return normalize ? PureState::normalized(std::move(v))
                         : PureState(std::move(v));
    } catch (const json::exception &e) {
        throw ValidationError(std::string("state literal: ") + e.what());
    }
}

inline json basis_to_json(const OperatorBasis &b) {
    json elements = json::array();
    for (const auto &c : b.elements()) {
        elements.push_back(hermitian_to_json(c));
    }
    json out{{"D", b.bond_dim()},
             {"elements", elements},
             {"construction", std::string(to_string(b.construction()))}};
    out["anchor"] = b.anchor() ? state_to_json(*b.anchor()) : json(nullptr);
    return out;
}

/// Raw, unvalidated content of a basis file.
struct BasisFile {
    std::size_t bond_dim = 0;
    std::vector<HermitianOperator> elements;
    std::optional<PureState> anchor;
    BasisConstruction construction = BasisConstruction::custom;
};

inline BasisFile basis_file_from_json(const json &j) {
    try {
        BasisFile f;
        f.bond_dim = j.at("D").get<std::size_t>();
        for (const auto &e : j.at("elements")) {
            f.elements.push_back(hermitian_from_json(e));
        }
        if (j.contains("anchor") && !j.at("anchor").is_null()) {
            f.anchor = state_from_json(j.at("anchor"));
        }
        if (j.contains("construction")) {
            f.construction =
                basis_construction_from_string(j.at("construction").get<std::string>());
        }
        return f;
    } catch (const json::exception &e) {
        throw ValidationError(std::string("basis file: ") + e.what());
    }
}

inline OperatorBasis basis_from_json(const json &j) {
    auto f = basis_file_from_json(j);
    return OperatorBasis(f.bond_dim, std::move(f.elements), std::move(f.anchor),
                         f.construction);
}

inline json measurement_set_to_json(const MeasurementSet &m) {
    json povms = json::array();
    for (const auto &p : m.povms()) {
        json elements = json::array();
        for (const auto &x : p.elements()) {
            elements.push_back(hermitian_to_json(x));
        }
        povms.push_back({{"label", p.label()}, {"elements", elements}});
    }
    return {{"dim", m.dim()}, {"povms", povms}};
}

inline MeasurementSet measurement_set_from_json(const json &j) {
    try {
        std::vector<Povm> povms;
        for (const auto &p : j.at("povms")) {
            std::vector<HermitianOperator> elements;
            for (const auto &x : p.at("elements")) {
                elements.push_back(hermitian_from_json(x));
            }
            povms.emplace_back(p.at("label").get<std::string>(), std::move(elements));
        }
        MeasurementSet out(std::move(povms));
        if (j.contains("dim") && j.at("dim").get<std::size_t>() != out.dim()) {
            throw ValidationError("measurement set: declared dim differs from "
                                  "element dimension");
        }
        return out;
    } catch (const json::exception &e) {
        throw ValidationError(std::string("measurement set: ") + e.what());
    }
}

inline json lattice_to_json(const Lattice &l) {
    json edges = json::array();
    for (const auto &e : l.edges()) {
        edges.push_back({e.head, e.tail});
    }
    return {{"n_sites", l.n_sites()}, {"edges", edges}};
}

inline Lattice lattice_from_json(const json &j) {
    try {
        std::vector<Edge> edges;
        for (const auto &e : j.at("edges")) {
            if (!e.is_array() || e.size() != 2) {
                throw ValidationError("lattice: edges must be [head, tail] pairs");
            }
            edges.push_back({e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>()});
        }
        return Lattice(j.at("n_sites").get<std::size_t>(), std::move(edges));
    } catch (const json::exception &e) {
        throw ValidationError(std::string("lattice: ") + e.what());
    }
}

} // namespace rsep
