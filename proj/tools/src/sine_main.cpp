#include <iostream>

#include "CLI11.hpp"
#include "qssm/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deterministic sine-wave CSV fixture generator"};
  qssm::SineSpec spec;
  std::string output = "sine.csv";
  app.add_option("--output", output, "CSV path to write");
  app.add_option("--length", spec.length, "number of rows");
  app.add_option("--period", spec.period, "steps per full cycle");
  app.add_option("--amplitude", spec.amplitude, "wave amplitude");
  app.add_option("--noise", spec.noise_std, "additive gaussian noise std");
  app.add_option("--seed", spec.seed, "noise seed");
  app.add_option("--step-seconds", spec.step_seconds, "timestamp spacing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    qssm::write_sine_csv(output, spec);
    std::cout << "wrote " << output << " (" << spec.length << " rows)\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
