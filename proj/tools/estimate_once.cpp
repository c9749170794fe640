#include <bspd/bspd.hpp>

#include <iostream>

int main() {
  const bspd::SystemModel model(bspd::SystemConfig{});  // N=256, M=512, B=15 GHz at 100 GHz
  const bspd::PatternBank bank(model);
  const bspd::Seed trial = bspd::Seed(1).split(0);

  const auto paths = bspd::sample_paths(trial.split(bspd::stream::kPaths), model.cfg);
  const auto ch = bspd::assemble_channel(paths, model);
  const auto comb = bspd::make_combiners(trial.split(bspd::stream::kCombiners), model);
  const auto obs = bspd::observe(ch, comb, bspd::snr_to_sigma2(10.0), trial.split(bspd::stream::kNoise));

  const auto est = bspd::bspd_estimate(obs.y, comb.effective, model.cfg.n_paths,
                                       model.cfg.window_halfwidth, bank);
  std::cout << "NMSE " << bspd::nmse_db(est.h_hat, ch.angle) << " dB\n";
}
