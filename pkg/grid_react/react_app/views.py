import logging

import numpy as np
from rest_framework import status, viewsets
from rest_framework.decorators import action
from rest_framework.response import Response

from .attacks import AttackScenario, Observation, simulate_attack
from .detection import expected_lifd_iterations, react, weight_success_fraction
from .exceptions import GridReactError, InputError
from .grid import line_flows, solve_dc_power_flow
from .io import parse_grid
from .serializers import (
    AttackRequestSerializer, DetectRequestSerializer, PowerflowRequestSerializer,
    WeightProbabilitySerializer,
)

logger = logging.getLogger(__name__)


def error_response(exc):
    code = status.HTTP_400_BAD_REQUEST if isinstance(exc, InputError) else status.HTTP_422_UNPROCESSABLE_ENTITY
    return Response({'error': str(exc), 'exit_code': exc.exit_code}, status=code)


class ReactViewSet(viewsets.ViewSet):
    """
    Stateless endpoints mirroring the powerflow, attack and detect commands
    """

    @action(detail=False, methods=['post'])
    def powerflow(self, request):
        """
        Solve the DC power flow of a grid
        POST /api/react/powerflow/
        """
        serializer = PowerflowRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        try:
            grid = parse_grid(serializer.validated_data['grid'])
            state = solve_dc_power_flow(grid)
        except GridReactError as exc:
            return error_response(exc)
        return Response({
            'theta': dict(zip(map(str, grid.node_ids), state.theta.tolist())),
            'flows': dict(zip(map(str, grid.edge_ids), line_flows(grid, state).tolist())),
            'residual': state.residual,
        })

    @action(detail=False, methods=['post'])
    def attack(self, request):
        """
        Simulate an attack scenario
        POST /api/react/attack/
        """
        serializer = AttackRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        try:
            grid = parse_grid(serializer.validated_data['grid'])
            scenario = AttackScenario.from_dict(serializer.validated_data['scenario'])
            observation, truth = simulate_attack(grid, solve_dc_power_flow(grid), scenario)
        except GridReactError as exc:
            return error_response(exc)
        return Response({
            'observation': observation.to_dict(grid),
            'truth': truth.to_dict(grid),
        })

    @action(detail=False, methods=['post'])
    def detect(self, request):
        """
        Run REACT on an observation
        POST /api/react/detect/
        """
        serializer = DetectRequestSerializer(data=request.data)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        data = serializer.validated_data
        try:
            grid = parse_grid(data['grid'])
            observation = Observation.from_dict(data['observation'], grid)
            outcome = react(grid, observation.theta_pre, observation.theta_obs, T=data['T'],
                            rng=np.random.default_rng(data['seed']))
        except GridReactError as exc:
            return error_response(exc)
        return Response(outcome.to_dict())

    @action(detail=False, methods=['get'])
    def weight_probability(self, request):
        """
        Probability that exponential weights favour a failure set of size k among m lines
        GET /api/react/weight_probability/?m=&k=
        """
        serializer = WeightProbabilitySerializer(data=request.query_params)
        if not serializer.is_valid():
            return Response(serializer.errors, status=status.HTTP_400_BAD_REQUEST)
        m, k = serializer.validated_data['m'], serializer.validated_data['k']
        exact = weight_success_fraction(m, k)
        return Response({
            'm': m,
            'k': k,
            'probability': float(exact),
            'fraction': '%d/%d' % (exact.numerator, exact.denominator),
            'expected_iterations': expected_lifd_iterations(m, k),
        })
