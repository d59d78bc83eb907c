#include <array>

#include "sfmkl/geometry.hpp"

namespace sfmkl {

    namespace {
        // 25-point spherical 5-design: equal-weight averages of every monomial of degree 1..5 match
        // the sphere averages (max residual below 1e-15).
        const std::array<Position3, 25> kTable = {{
            Position3{-0.31618441024969091, -0.82979999247640113, 0.45984713895078216},
            Position3{-0.68215265962874172, -0.35267036939152019, 0.64053989689533219},
            Position3{0.28645423549414495, 0.63622179230329823, -0.716355918497114},
            Position3{-0.13994044339175052, 0.85832647959838038, 0.49365203000045643},
            Position3{0.92466560868169057, -0.33380824790082464, 0.18320907661658167},
            Position3{-0.82039773591817278, 0.19146472597699701, 0.53878457068376551},
            Position3{-0.21741417859481654, 0.87798232354864181, -0.42647170419861319},
            Position3{-0.24511275018712611, -0.2918072118149681, -0.92453679798506549},
            Position3{0.67352652770181831, -0.4214151570400021, 0.60726541305995885},
            Position3{0.7462357259762239, 0.26486759859024878, -0.6107187540052893},
            Position3{0.64042937533280042, 0.55143608695762136, 0.53457315421905127},
            Position3{0.92984457879548488, 0.3627113474529729, 0.061883258749812195},
            Position3{-0.92926805840984061, 0.2364441786459025, -0.28382217320651615},
            Position3{0.35809762691494534, 0.93367996909283058, 0.0027937273839052697},
            Position3{-0.038024873006580896, -0.050163291630770546, -0.99801691028038186},
            Position3{-0.58305177249978946, -0.70868069895787311, -0.39726854583446997},
            Position3{0.0198398854853521, -0.95978301899239649, -0.28004095307252713},
            Position3{-0.90181967647257211, -0.40897371888603024, -0.13950544214271979},
            Position3{-0.59362702908752984, 0.72388770522007373, 0.35155872989861708},
            Position3{0.70860781312700594, -0.33575590950803752, -0.62059885304904716},
            Position3{0.20356687298846857, -0.80562285346970941, 0.55635631225772908},
            Position3{-0.64167433269514829, 0.45870244672195948, -0.61469188715284351},
            Position3{0.48603945120581121, -0.7930803812002849, -0.3671364335322288},
            Position3{0.21784500000393917, 0.2124229457947342, 0.95258597935995848},
            Position3{-0.086484781565925831, -0.016586748634838319, 0.99611508488086797},
        }};
    }  // namespace

    std::span<const Position3>
    TDesign25() {
        return kTable;
    }

}  // namespace sfmkl
