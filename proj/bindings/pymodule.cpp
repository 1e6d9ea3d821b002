#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fk/bounds.hpp"
#include "fk/bulk.hpp"
#include "fk/lattice.hpp"
#include "fk/segregation.hpp"
#include "fk/spectral.hpp"
#include "fk/version.hpp"

namespace py = pybind11;

namespace {

py::dict report_dict(const fk::BoundReport& r) {
    py::dict d;
    d["name"] = r.name;
    d["lhs"] = r.lhs;
    d["rhs"] = r.rhs;
    d["slack"] = r.slack;
    d["tol"] = r.tol;
    d["pass"] = r.pass;
    d["inputs"] = r.inputs.dump();
    return d;
}

py::list report_list(const std::vector<fk::BoundReport>& rs) {
    py::list out;
    for (const auto& r : rs) out.append(report_dict(r));
    return out;
}

}  // namespace

PYBIND11_MODULE(_fklab, m) {
    m.doc() = "Lattice electron energy laboratory (C++ core)";
    m.def("version", &fk::version);

    py::class_<fk::Torus>(m, "Torus")
        .def(py::init<std::vector<int>>(), py::arg("dims"))
        .def_readonly("dims", &fk::Torus::dims)
        .def_property_readonly("volume", &fk::Torus::volume)
        .def("__repr__", [](const fk::Torus& t) {
            std::string s = "Torus([";
            for (std::size_t i = 0; i < t.dims.size(); ++i)
                s += (i ? "," : "") + std::to_string(t.dims[i]);
            return s + "])";
        });

    py::class_<fk::Domain>(m, "Domain")
        .def(py::init([](int d, std::vector<fk::Coord> sites, std::optional<fk::Torus> torus) {
                 return fk::Domain(d, std::move(sites), std::move(torus));
             }),
             py::arg("dimension"), py::arg("sites"), py::arg("torus") = std::nullopt)
        .def_static("from_text", [](const std::string& text) { return fk::parse_domain(text); })
        .def("to_text", [](const fk::Domain& d) { return fk::serialize_domain(d); })
        .def_property_readonly("dimension", &fk::Domain::dimension)
        .def_property_readonly("sites", [](const fk::Domain& d) { return d.sites(); })
        .def("__len__", [](const fk::Domain& d) { return d.size(); })
        .def("hash", [](const fk::Domain& d) { return fk::domain_hash(d); });

    m.def("random_connected_domain", &fk::random_connected_domain, py::arg("d"), py::arg("size"),
          py::arg("seed"));

    m.def("boundary_stats", [](const fk::Domain& d) {
        fk::BoundaryStats st = fk::boundary_stats(d);
        py::dict out;
        out["boundary"] = st.boundary;
        out["boundary_size"] = st.boundary_size();
        out["q_i"] = st.q_i;
        out["q_ij"] = st.q_ij;
        out["q_x"] = st.q_x;
        out["k_hist"] = st.k_hist;
        out["bonds"] = st.bonds;
        out["crossing_bonds"] = st.crossing_bonds;
        out["K"] = st.k_value(d.dimension());
        return out;
    });

    m.def(
        "dirichlet_spectrum",
        [](const fk::Domain& d, int cap) {
            fk::Spectrum s = fk::eigensolve(fk::build_dirichlet(d), cap);
            return py::make_tuple(s.eigenvalues, s.eigenvectors);
        },
        py::arg("domain"), py::arg("cap") = fk::kDefaultEigensolveCap);
    m.def(
        "screened_spectrum",
        [](const fk::Torus& t, const fk::Domain& holes, double u, int cap) {
            fk::Spectrum s = fk::eigensolve(fk::build_screened(t, holes, u), cap);
            return py::make_tuple(s.eigenvalues, s.eigenvectors);
        },
        py::arg("torus"), py::arg("holes"), py::arg("U"),
        py::arg("cap") = fk::kDefaultEigensolveCap);
    m.def("ground_energy",
          [](const Eigen::VectorXd& evals, int n) { return fk::ground_energy(evals, n); });
    m.def("free_energy", [](const Eigen::VectorXd& evals, double beta, double mu) {
        return fk::free_energy(evals, beta, mu);
    });

    py::class_<fk::BulkModel>(m, "BulkModel")
        .def(py::init<int, int>(), py::arg("d"), py::arg("points_per_axis"))
        .def_property_readonly("dimension", &fk::BulkModel::dimension)
        .def("filling", &fk::BulkModel::filling)
        .def("fermi_level", &fk::BulkModel::fermi_level)
        .def("energy", &fk::BulkModel::energy)
        .def("energy_error", &fk::BulkModel::energy_error)
        .def("free_energy", &fk::BulkModel::free_energy)
        .def("level_set_averages", &fk::BulkModel::level_set_averages);

    m.def("dispersion", &fk::dispersion);
    m.def("sphere_volume", &fk::sphere_volume);
    m.def("default_bulk_points", &fk::default_bulk_points);

    m.def("n_star", &fk::n_star);
    m.def("alpha", &fk::alpha);
    m.def("eta", &fk::eta);
    m.def("gamma_screening", &fk::gamma_screening);
    m.def("gamma_bar_screening", &fk::gamma_bar_screening);
    m.def("mu_estimate", &fk::mu_estimate, py::arg("eps_f"), py::arg("d") = 2,
          py::arg("eps_grid") = 64, py::arg("c_grid") = 256);

    m.def(
        "energy_sandwich_check",
        [](const fk::Domain& d, int n, const fk::BulkModel& bulk) {
            return report_list(fk::energy_sandwich_check(d, n, bulk));
        },
        py::arg("domain"), py::arg("n_electrons"), py::arg("bulk"));
    m.def(
        "decorrelation_check",
        [](const fk::Torus& t, const std::vector<fk::Coord>& holes, double beta, double mu,
           double u) { return report_dict(fk::decorrelation_check(t, holes, beta, mu, u)); },
        py::arg("torus"), py::arg("holes"), py::arg("beta"), py::arg("mu"), py::arg("U"));

    m.def(
        "config_energy",
        [](const fk::Torus& t, const std::vector<int>& holes, int n_electrons, double u) {
            fk::EnergyParams p;
            p.mode = fk::EnergyParams::Mode::ground;
            p.n_electrons = n_electrons;
            p.u = u;
            return fk::config_energy(t, holes, p);
        },
        py::arg("torus"), py::arg("holes"), py::arg("n_electrons"),
        py::arg("U") = std::numeric_limits<double>::infinity());

    m.def(
        "exact_delta_corr",
        [](const fk::Torus& t, int m, int n_electrons, double beta_s, std::vector<int> z) {
            fk::EnergyParams p;
            p.mode = fk::EnergyParams::Mode::ground;
            p.n_electrons = n_electrons;
            fk::ExactEnsemble ens = fk::exact_ensemble(t, m, p);
            return fk::ensemble_delta_corr(t, ens, beta_s, z);
        },
        py::arg("torus"), py::arg("holes"), py::arg("n_electrons"), py::arg("beta_s"),
        py::arg("displacement"));
}
