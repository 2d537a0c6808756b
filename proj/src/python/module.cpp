#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "unmix/baseline.hpp"
#include "unmix/eval.hpp"
#include "unmix/model.hpp"
#include "unmix/potts.hpp"
#include "unmix/sampler.hpp"
#include "unmix/synth.hpp"

namespace py = pybind11;
using namespace unmix;

namespace {

ImageCube make_cube(int width, int height,
                    const Eigen::Ref<const Eigen::MatrixXd>& data) {
  ImageCube cube;
  cube.width = width;
  cube.height = height;
  cube.bands = static_cast<int>(data.cols());
  cube.data = data;
  cube.validate();
  return cube;
}

EndmemberMatrix make_endmembers(
    const Eigen::Ref<const Eigen::MatrixXd>& spectra) {
  EndmemberMatrix m;
  m.spectra = spectra;
  m.validate();
  return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spatially constrained Bayesian hyperspectral unmixing";

  py::enum_<NeighborhoodOrder>(m, "NeighborhoodOrder")
      .value("first", NeighborhoodOrder::First)
      .value("second", NeighborhoodOrder::Second);

  py::class_<LabelField>(m, "LabelField")
      .def(py::init<>())
      .def_readwrite("width", &LabelField::width)
      .def_readwrite("height", &LabelField::height)
      .def_readwrite("num_classes", &LabelField::num_classes)
      .def_readwrite("beta", &LabelField::beta)
      .def_readwrite("labels", &LabelField::labels);

  py::class_<PosteriorSamples>(m, "PosteriorSamples")
      .def_readonly("num_classes", &PosteriorSamples::num_classes)
      .def_readonly("num_endmembers", &PosteriorSamples::num_endmembers)
      .def_readonly("s2", &PosteriorSamples::s2)
      .def_readonly("v2", &PosteriorSamples::v2)
      .def_readonly("delta", &PosteriorSamples::delta)
      .def_property_readonly("draws", &PosteriorSamples::draws)
      .def("acceptance_rate_per_coordinate",
           &PosteriorSamples::acceptance_rate_per_coordinate);

  m.def("softmax_abundances", &softmax_abundances, py::arg("coeffs"));
  m.def(
      "forward",
      [](const Eigen::Ref<const Eigen::MatrixXd>& spectra,
         const Eigen::VectorXd& a) {
        return forward(make_endmembers(spectra), a);
      },
      py::arg("endmembers"), py::arg("abundances"));
  m.def(
      "log_likelihood_pixel",
      [](const Eigen::VectorXd& y, const Eigen::VectorXd& c, double s2,
         const Eigen::Ref<const Eigen::MatrixXd>& spectra) {
        return log_likelihood_pixel(y, c, s2, make_endmembers(spectra));
      },
      py::arg("y"), py::arg("coeffs"), py::arg("s2"), py::arg("endmembers"));

  m.def(
      "fcls_unmix_pixel",
      [](const Eigen::VectorXd& y,
         const Eigen::Ref<const Eigen::MatrixXd>& spectra, double tol) {
        return fcls_unmix_pixel(y, make_endmembers(spectra), tol);
      },
      py::arg("y"), py::arg("endmembers"), py::arg("tol") = 1e-10);
  m.def(
      "fcls_unmix_image",
      [](int width, int height, const Eigen::Ref<const Eigen::MatrixXd>& data,
         const Eigen::Ref<const Eigen::MatrixXd>& spectra, int threads) {
        return fcls_unmix_image(make_cube(width, height, data),
                                make_endmembers(spectra), 1e-10, threads);
      },
      py::arg("width"), py::arg("height"), py::arg("data"),
      py::arg("endmembers"), py::arg("threads") = 1);

  m.def("sample_field", &sample_field, py::arg("num_classes"),
        py::arg("beta"), py::arg("width"), py::arg("height"),
        py::arg("order") = NeighborhoodOrder::First, py::arg("sweeps") = 200,
        py::arg("seed") = 0, py::arg("threads") = 1);
  m.def("homogeneity", &homogeneity, py::arg("field"),
        py::arg("order") = NeighborhoodOrder::First);

  m.def(
      "run_chain",
      [](int width, int height, const Eigen::Ref<const Eigen::MatrixXd>& data,
         const Eigen::Ref<const Eigen::MatrixXd>& spectra, int n_mc,
         int n_burn, double beta, int num_classes, std::uint64_t seed,
         int threads) {
        ChainConfig cfg;
        cfg.n_mc = n_mc;
        cfg.n_burn = n_burn;
        cfg.beta = beta;
        cfg.num_classes = num_classes;
        cfg.seed = seed;
        cfg.threads = threads;
        return run_chain(make_cube(width, height, data),
                         make_endmembers(spectra), cfg);
      },
      py::arg("width"), py::arg("height"), py::arg("data"),
      py::arg("endmembers"), py::arg("n_mc") = 5000, py::arg("n_burn") = 500,
      py::arg("beta") = 1.1, py::arg("num_classes") = 3, py::arg("seed") = 0,
      py::arg("threads") = 1);

  m.def("estimate_map_labels", &estimate_map_labels, py::arg("samples"));
  m.def(
      "estimate_mmse_abundances",
      [](const PosteriorSamples& samples, const LabelField& map_labels) {
        return estimate_mmse_abundances(samples, map_labels).values;
      },
      py::arg("samples"), py::arg("map_labels"));

  m.def(
      "global_mse",
      [](const Eigen::Ref<const Eigen::MatrixXd>& est,
         const Eigen::Ref<const Eigen::MatrixXd>& truth) {
        AbundanceMatrix a, b;
        a.values = est;
        b.values = truth;
        return global_mse(a, b);
      },
      py::arg("estimated"), py::arg("truth"));

  m.def(
      "generate_scene",
      [](int width, int height, int num_classes, int num_endmembers,
         int bands, double beta,
         const Eigen::Ref<const Eigen::MatrixXd>& class_means,
         const Eigen::Ref<const Eigen::MatrixXd>& class_vars,
         double noise_variance, std::uint64_t seed) {
        SceneSpec spec;
        spec.width = width;
        spec.height = height;
        spec.num_classes = num_classes;
        spec.num_endmembers = num_endmembers;
        spec.bands = bands;
        spec.beta = beta;
        spec.class_means = class_means;
        spec.class_vars = class_vars;
        spec.noise_variance = noise_variance;
        spec.seed = seed;
        Scene scene = generate_scene(spec);
        return py::make_tuple(scene.cube.data, scene.truth_abundances.values,
                              scene.truth_labels, scene.endmembers.spectra,
                              scene.snr_db);
      },
      py::arg("width"), py::arg("height"), py::arg("num_classes"),
      py::arg("num_endmembers"), py::arg("bands"), py::arg("beta"),
      py::arg("class_means"), py::arg("class_vars"),
      py::arg("noise_variance"), py::arg("seed") = 0);

  m.def(
      "procedural_endmembers",
      [](int bands, int count, std::uint64_t seed) {
        return procedural_endmembers(bands, count, seed).spectra;
      },
      py::arg("bands"), py::arg("count"), py::arg("seed") = 0);
}
