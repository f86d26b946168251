# Dunkl-Williams Laboratory - Source Package
