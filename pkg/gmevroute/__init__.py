#
# This file is part of gmevroute which is released under the BSD 3-clause
# license. See accompanying LICENSE.md for copyright notice and full license
# details.
#

from ._errors import (
    ConvergenceError,
    DegenerateRouteError,
    DomainError,
    EstimationError,
    NetworkError,
    SpecificationError
)

from ._network import (
    inclusion_matrix,
    Link,
    overlap_cost,
    path_size_factors,
    ref_path_size_factors,
    Route,
    route_cost,
    RouteSet,
    similarity_matrix
)

from ._generating_functions import (
    choice_probabilities,
    eval_G,
    GeneratingFunction,
    grad_G,
    LinkNestedFunction,
    log_choice_probabilities,
    MultinomialFunction,
    PairedCombinatorialFunction,
    PathSizeFunction
)

from ._generating_vectors import (
    AdditiveVector,
    gen_vector,
    GeneratingVector,
    HybridAdditiveVector,
    HybridMultiplicativeVector,
    MultiplicativeVector,
    negative_utilities,
    UtilitySpecification
)

from ._reference import (
    conditional_matrix,
    conditional_probabilities,
    EqualPolicy,
    FixedPolicy,
    function_for_reference,
    log_md_probabilities,
    MarkovChainPolicy,
    md_gen_vector,
    md_probabilities,
    MultiplicativeDeltaVector,
    reference_distribution,
    ReferencePolicy
)

from ._moments import (
    additive_moments,
    md_conditional_moments,
    MomentReport,
    multiplicative_moments,
    sample_utilities
)

from ._models import (
    ChoiceModel,
    GMEVModel,
    log_model_probabilities,
    model_probabilities,
    ModelSpecification,
    ReducedModel,
    shared_links
)

from ._probit import (
    build_covariance,
    foreseen_variance_share,
    generate_example_network,
    MnpSpecification,
    scenario_stream,
    simulate_probabilities
)

from ._core import (
    IterationCollector,
    OutputCollector
)

from ._equilibrium import (
    AffineCost,
    BPRCost,
    ConstantCost,
    duality_gap,
    generalized_cost,
    LinkCostFunction,
    solve_sue,
    successive_averages,
    SUEProblem,
    SUESolution,
    SUESolver
)

from ._estimation import (
    ChoiceDataset,
    ChoiceLogLikelihood,
    estimate,
    EstimationResult,
    log_likelihood,
    MaximumLikelihoodEstimator,
    validate
)

from ._dataset_library_api import (
    DatasetLibrary
)

from ._experiment import (
    behaviour_check,
    default_models,
    NetworkExperiment
)

from ._cli import (
    main
)
