#include "catorder/io.hpp"

namespace catorder {

namespace {

// Transcribed counts; see data/police.csv for the same table on disk.
constexpr std::string_view kPolice = R"csv(# US police involved fatalities 2000-2016, aggregated by armed status, gender,
# fleeing and mental illness. The group (Unarmed, Female, Flee, Mental illness)
# has no observations and is omitted.
# Categories: o = other, s = shot, st = shot and tasered, t = tasered.
# responses: o,s,st,t
armed,gender,flee,mental_illness,o,s,st,t
Gun,Female,False,False,0,134,0,1
Gun,Female,False,True,0,57,0,1
Gun,Female,True,False,0,8,0,0
Gun,Female,True,True,0,4,0,0
Gun,Male,False,False,2,3314,6,35
Gun,Male,False,True,0,810,4,15
Gun,Male,True,False,0,271,5,0
Gun,Male,True,True,0,33,1,0
Other,Female,False,False,0,53,1,0
Other,Female,False,True,1,42,1,0
Other,Female,True,False,0,4,1,0
Other,Female,True,True,0,2,0,0
Other,Male,False,False,1,910,38,10
Other,Male,False,True,2,478,21,5
Other,Male,True,False,0,114,10,0
Other,Male,True,True,0,14,2,0
Unarmed,Female,False,False,1,231,0,3
Unarmed,Female,False,True,0,61,0,5
Unarmed,Female,True,False,0,2,0,0
Unarmed,Male,False,False,10,4338,16,253
Unarmed,Male,False,True,12,832,5,214
Unarmed,Male,True,False,0,75,8,0
Unarmed,Male,True,True,0,5,1,0
)csv";

constexpr std::string_view kBaselinePoSim = R"csv(# Simulated from a baseline-category po model with category 4 as the
# baseline, theta = (-0.8, -0.3, -1.0, 0.5); 400 observations.
# responses: y1,y2,y3,y4
x,y1,y2,y3,y4
1,22,33,10,35
2,31,40,14,15
3,23,43,22,12
4,27,49,18,6
)csv";

}  // namespace

std::string_view builtin_csv(std::string_view name) {
  if (name == "police") return kPolice;
  if (name == "baseline-po-sim") return kBaselinePoSim;
  throw Error(ErrorKind::InvalidArgument, "unknown built-in dataset '" + std::string(name) + "'");
}

}  // namespace catorder
