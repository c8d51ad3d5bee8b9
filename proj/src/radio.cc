#include "llnroute/radio.h"

#include <cmath>
#include <stdexcept>

namespace llnroute
{

double
Distance(Position a, Position b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

double
PRecv(double distanceM, const RadioModel& model)
{
    if (!(distanceM >= 0.0))
    {
        throw std::invalid_argument("distance must be non-negative");
    }
    if (distanceM > model.rangeM)
    {
        return 0.0;
    }
    if (!model.distanceLoss)
    {
        return model.baseSuccess;
    }
    return model.baseSuccess * (1.0 - std::pow(distanceM / model.rangeM, model.alpha));
}

} // namespace llnroute
