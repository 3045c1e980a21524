# Package marker for agmh.infrastructure.plotting
