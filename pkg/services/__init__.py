# Analytic engines, Monte-Carlo simulator and parameter search
