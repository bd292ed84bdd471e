// units.cpp - meV <-> cm^-1 conversion

#include "bathsmith/units.hpp"

namespace bathsmith::units {

double mev_to_cm(double mev) { return mev * kCmPerMeV; }
double cm_to_mev(double cm) { return cm / kCmPerMeV; }

} // namespace bathsmith::units
