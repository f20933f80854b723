#include <gtest/gtest.h>

#include <sstream>

#include "uavrt/materials.hpp"

using namespace uavrt;

// Reference values computed independently in Python from the
// textbook Fresnel formulas for eps' - j eps''.

TEST(Carrier, WavelengthAt28GHz) { EXPECT_NEAR(CarrierSpec{}.wavelength(), 0.0107068735, 1e-12); }

TEST(FreeSpace, GainAt40m) {
  EXPECT_NEAR(to_db(free_space_gain(40.0, CarrierSpec{})), -93.43214367528701, 1e-10);
  EXPECT_THROW(free_space_gain(0.0, CarrierSpec{}), std::domain_error);
  EXPECT_THROW(free_space_gain(-1.0, CarrierSpec{}), std::domain_error);
}

TEST(FreeSpace, PathGainModelWithSquareLawMatchesFreeSpace) {
  const PathGainModel m;
  for (double d : {1.0, 40.0, 1234.5}) EXPECT_NEAR(m.power(d), free_space_gain(d, CarrierSpec{}), 1e-18);
  const PathGainModel steep{2.0, 3.0, {}};
  EXPECT_NEAR(steep.power(10.0) / steep.power(20.0), 8.0, 1e-9);
}

TEST(Fresnel, WetEarthAtTrajectoryStart) {
  const MaterialTable t = MaterialTable::defaults();
  const double psi = 1.313472611823808;  // atan(152 / 40)
  const auto tm = fresnel_reflection(psi, t.at("wet_earth"), Polarization::Parallel);
  const auto te = fresnel_reflection(psi, t.at("wet_earth"), Polarization::Perpendicular);
  EXPECT_NEAR(std::abs(tm), 0.5822673118688791, 1e-12);
  EXPECT_NEAR(std::arg(tm), -0.043089463623438656, 1e-12);
  EXPECT_NEAR(std::abs(te), 0.6026213244632848, 1e-12);
}

TEST(Fresnel, SeaWaterAndConcrete) {
  const MaterialTable t = MaterialTable::defaults();
  const double psi = 1.313472611823808;
  const auto tm = fresnel_reflection(psi, t.at("sea_water"), Polarization::Parallel);
  EXPECT_NEAR(std::abs(tm), 0.737918917317242, 1e-12);
  EXPECT_NEAR(std::arg(tm), -0.16562872250676267, 1e-12);
  EXPECT_NEAR(std::abs(fresnel_reflection(psi, t.at("sea_water"), Polarization::Perpendicular)), 0.7525769660115027, 1e-12);
  EXPECT_NEAR(std::abs(fresnel_reflection(psi, t.at("concrete"), Polarization::Parallel)), 0.3846097086910153, 1e-12);
}

TEST(Fresnel, LimitsAndBounds) {
  const Material lossless{"glass", 4.0, 0.0};
  // normal incidence: both branches equal (1 - n) / (1 + n) in magnitude
  const double r0 = (1.0 - 2.0) / (1.0 + 2.0);
  EXPECT_NEAR(std::abs(fresnel_reflection(kPi / 2, lossless, Polarization::Parallel)), std::abs(r0), 1e-12);
  EXPECT_NEAR(std::abs(fresnel_reflection(kPi / 2, lossless, Polarization::Perpendicular)), std::abs(r0), 1e-12);
  // grazing incidence tends to total reflection
  EXPECT_NEAR(std::abs(fresnel_reflection(1e-7, lossless, Polarization::Parallel)), 1.0, 1e-6);
  // Brewster angle of a lossless dielectric: TM vanishes at tan(psi) = 1 / n
  EXPECT_NEAR(std::abs(fresnel_reflection(std::atan(0.5), lossless, Polarization::Parallel)), 0.0, 1e-12);
  for (double psi = 0.01; psi < kPi / 2; psi += 0.01)
    for (auto pol : {Polarization::Parallel, Polarization::Perpendicular})
      EXPECT_LE(std::abs(fresnel_reflection(psi, MaterialTable::defaults().at("concrete"), pol)), 1.0);
  EXPECT_THROW(fresnel_reflection(0.0, lossless, Polarization::Parallel), std::domain_error);
  EXPECT_THROW(fresnel_reflection(2.0, lossless, Polarization::Parallel), std::domain_error);
}

TEST(GrazingAngle, TwoRayGeometry) {
  EXPECT_NEAR(grazing_angle(2, 150, 40) * 180 / kPi, 75.25643716352927, 1e-11);
  EXPECT_THROW(grazing_angle(0, 1, 1), std::domain_error);
  EXPECT_THROW(grazing_angle(1, 1, 0), std::domain_error);
}

TEST(SeaLayer, GroundIsLosslessSeaUsesTmPower) {
  const MaterialTable t = MaterialTable::defaults();
  EXPECT_EQ(sea_layer_loss(SurfaceKind::Ground, t.at("sea_water"), 0.5), 1.0);
  EXPECT_NEAR(sea_layer_loss(SurfaceKind::Sea, t.at("sea_water"), 1.313472611823808), 0.5445243285346507, 1e-12);
}

TEST(MaterialTable, ParseOverridesAndReportsLines) {
  std::istringstream in("# custom\nglass 6.27 0.14\nconcrete 6 0.5  # override\n\n");
  const MaterialTable t = MaterialTable::parse(in);
  EXPECT_EQ(t.size(), 4u);
  EXPECT_DOUBLE_EQ(t.at("concrete").rel_permittivity_real, 6.0);
  EXPECT_DOUBLE_EQ(t.at("glass").rel_permittivity_imag, 0.14);
  EXPECT_THROW(t.at("unobtainium"), std::out_of_range);

  std::istringstream bad("glass 6.27\n");
  try {
    MaterialTable::parse(bad);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
  }
  std::istringstream unphysical("ok 2 0\nweird 0.5 0\n");
  try {
    MaterialTable::parse(unphysical);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}
